"""Exact enumeration formulas, truncated rational power series and the critical offspring law.

Everything here is exact (``int`` / :class:`fractions.Fraction`) except the
explicitly float-valued diagnostics (:func:`mu_tail_ratio`, :func:`log_mu`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

Z_CRIT = Fraction(4, 27)
C_AT_CRIT = Fraction(4, 3)
CHAT_AT_CRIT = Fraction(4, 9)
MU_MEAN = Fraction(2, 3)
TAIL_CONSTANT = math.sqrt(8 / (27 * math.pi))


def count_maps(n: int) -> int:
    """Number of rooted planar maps with ``n`` edges, 2 * 3^n (2n)! / ((n+2)! n!)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    num = 2 * 3**n * math.factorial(2 * n)
    den = math.factorial(n + 2) * math.factorial(n)
    q, r = divmod(num, den)
    assert r == 0
    return q


@lru_cache(maxsize=4096)
def count_two_connected(k: int) -> int:
    """Number of rooted 2-connected maps with ``k`` edges (``C_0 = 1``)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return 1
    num = 2 * math.factorial(3 * k - 3)
    den = math.factorial(k) * math.factorial(2 * k - 1)
    q, r = divmod(num, den)
    assert r == 0
    return q


class RationalSeries:
    """Power series with exact rational coefficients, truncated after ``z^order``."""

    def __init__(self, coeffs: Sequence, order: int | None = None):
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("order must be non-negative")
        c = [Fraction(x) for x in coeffs[: order + 1]]
        c.extend([Fraction(0)] * (order + 1 - len(c)))
        self.coeffs = c
        self.order = order

    def __repr__(self):
        return f"RationalSeries({[str(c) for c in self.coeffs]})"

    def __eq__(self, other):
        if not isinstance(other, RationalSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def _coerce(self, other) -> "RationalSeries":
        if isinstance(other, RationalSeries):
            return other
        return RationalSeries([other], self.order)

    def __add__(self, other):
        other = self._coerce(other)
        n = min(self.order, other.order)
        return RationalSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], n)

    __radd__ = __add__

    def __neg__(self):
        return RationalSeries([-a for a in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            if a[i]:
                ai = a[i]
                for j in range(n + 1 - i):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return RationalSeries(out, n)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        result = RationalSeries([1], self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int = 1) -> "RationalSeries":
        """Multiply by ``z^k``."""
        return RationalSeries([0] * k + self.coeffs, self.order)

    def compose(self, inner: "RationalSeries") -> "RationalSeries":
        """``self(inner(z))``; ``inner`` must have zero constant term."""
        if inner.coeffs[0] != 0:
            raise ValueError("inner series must have zero constant term")
        n = min(self.order, inner.order)
        result = RationalSeries([self.coeffs[n]], n)
        for i in range(n - 1, -1, -1):
            result = result * inner + self.coeffs[i]
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]


def maps_series(order: int) -> RationalSeries:
    return RationalSeries([count_maps(i) for i in range(order + 1)], order)


def two_connected_series(order: int) -> RationalSeries:
    return RationalSeries([count_two_connected(i) for i in range(order + 1)], order)


def compose_check(order: int, two_connected: Sequence[int] | None = None) -> bool:
    """Check ``M(z) = C(z M(z)^2)`` modulo ``z^(order+1)``.

    ``two_connected`` optionally overrides the coefficients of ``C``.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    m = maps_series(order)
    c = two_connected_series(order) if two_connected is None else RationalSeries(two_connected, order)
    return (m - c.compose((m * m).shift(1))).is_zero()


def lagrange_check(n: int, two_connected: Sequence[int] | None = None) -> bool:
    """Check ``M_n = [y^(2n)] C(y^2)^(2n+1) / (2n+1)`` exactly.

    ``h(y) = y M(y^2)`` solves ``h = y C(h^2)``, so Lagrange inversion applies
    with the series ``C(y^2)`` in the variable ``y``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    c = two_connected_series(n) if two_connected is None else RationalSeries(two_connected, n)
    even = [0] * (2 * n + 1)
    for k in range(n + 1):
        even[2 * k] = c[k]
    phi = RationalSeries(even, 2 * n)
    return (phi ** (2 * n + 1))[2 * n] / (2 * n + 1) == count_maps(n)


# -- critical values ----------------------------------------------------------

def critical_term(k: int, coeff: Callable[[int], int] = count_two_connected) -> Fraction:
    """``C_k (4/27)^k``."""
    return coeff(k) * Z_CRIT**k


# Coefficients of r(k) = c0 k + c1 + c2/k + c3/k^2 + c4/k^3, chosen so that
# r(k) - r(k+1) t_{k+1}/t_k = 1 + O(k^-5); then sum_{k>=J} t_k ~ r(J) t_J.
_TAIL_R = (Fraction(2, 3), Fraction(7, 27), Fraction(40, 243), Fraction(1240, 19683), Fraction(-2200, 177147))


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_add(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return [x + y for x, y in zip(a, b)]


def _poly_shift1(a):
    """Coefficients of p(k+1) given those of p(k) (lowest degree first)."""
    out = [Fraction(0)] * len(a)
    for i, c in enumerate(a):
        for j in range(i + 1):
            out[j] += c * math.comb(i, j)
    return out


def _tail_error_numerator() -> list[Fraction]:
    """Numerator P of r(k) - r(k+1) rho(k) - 1 over k^3 (k+1)^4 (k+1/2)."""
    c0, c1, c2, c3, c4 = _TAIL_R
    R = [c4, c3, c2, c1, c0]
    kp1 = [Fraction(1), Fraction(1)]
    kp1_4 = _poly_mul(_poly_mul(kp1, kp1), _poly_mul(kp1, kp1))
    khalf = [Fraction(1, 2), Fraction(1)]
    k3 = [Fraction(0)] * 3 + [Fraction(1)]
    rho_num = _poly_mul([Fraction(-1, 3), Fraction(1)], [Fraction(-2, 3), Fraction(1)])
    first = _poly_mul(_poly_mul(R, kp1_4), khalf)
    second = _poly_mul(_poly_mul(_poly_shift1(R), k3), rho_num)
    third = _poly_mul(_poly_mul(k3, kp1_4), khalf)
    p = _poly_add(_poly_add(first, [-x for x in second]), [-x for x in third])
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


@dataclass(frozen=True)
class TailBounds:
    """Rigorous enclosure of ``sum_{k >= J} C_k (4/27)^k``."""
    start: int
    lower: Fraction
    upper: Fraction


def tail_bounds(start: int) -> TailBounds:
    """Bracket the tail ``T_J = sum_{k>=J} t_k`` of ``C(4/27)``.

    Uses the telescoping identity ``sum_{k>=J} t_k (1 + e(k)) = r(J) t_J`` with
    a rational error ``e(k) = P(k) / (k^3 (k+1)^4 (k+1/2))``, the bound
    ``|P(k)| <= A k^deg P`` for ``k >= J`` and the monotonicity
    ``t_{k+1} / t_k <= (k / (k+1))^2`` (valid for all ``k >= 1``).
    """
    J = start
    if J < 1:
        raise ValueError("tail start must be at least 1")
    tJ = critical_term(J)
    c0, c1, c2, c3, c4 = _TAIL_R
    r = c0 * J + c1 + c2 / J + c3 / J**2 + c4 / J**3
    p = _tail_error_numerator()
    d = len(p) - 1
    A = sum(abs(c) * Fraction(J) ** (i - d) for i, c in enumerate(p))
    q = 10 - d  # |e(k)| t_k <= A t_J J^2 k^-q
    if q < 2:
        raise AssertionError("tail error numerator degree too large")
    zeta_tail = Fraction(1, J**q) + Fraction(1, (q - 1) * J ** (q - 1))
    err = A * tJ * J**2 * zeta_tail
    est = r * tJ
    return TailBounds(J, max(est - err, tJ), est + err)


@dataclass(frozen=True)
class CriticalValues:
    K: int
    partial_C: Fraction
    partial_Chat: Fraction
    C_lower: Fraction
    C_upper: Fraction
    Chat_lower: Fraction
    Chat_upper: Fraction

    def contains_targets(self) -> bool:
        return (self.C_lower <= C_AT_CRIT <= self.C_upper
                and self.Chat_lower <= CHAT_AT_CRIT <= self.Chat_upper)

    @property
    def width(self) -> Fraction:
        return max(self.C_upper - self.C_lower, self.Chat_upper - self.Chat_lower)


def critical_values(K: int, coeff: Callable[[int], int] = count_two_connected) -> CriticalValues:
    """Rational brackets for ``C(4/27)`` and ``Chat(4/27) = sum k C_k (4/27)^k``.

    Partial sums run over ``k <= K``.  The tail of ``Chat`` follows from that
    of ``C`` through the exact telescoping identity
    ``sum_{k>=J} (k - 4/9) t_k = J (2J - 1) t_J``.
    """
    if K < 2:
        raise ValueError("increase K (need K >= 2)")
    pc = Fraction(0)
    pch = Fraction(0)
    for k in range(K + 1):
        t = critical_term(k, coeff)
        pc += t
        pch += k * t
    J = K + 1
    tb = tail_bounds(J)
    tJ = critical_term(J)
    exact_part = J * (2 * J - 1) * tJ
    return CriticalValues(
        K=K,
        partial_C=pc,
        partial_Chat=pch,
        C_lower=pc + tb.lower,
        C_upper=pc + tb.upper,
        Chat_lower=pch + Fraction(4, 9) * tb.lower + exact_part,
        Chat_upper=pch + Fraction(4, 9) * tb.upper + exact_part,
    )


# -- the critical offspring law ----------------------------------------------

def mu_pmf(k: int) -> Fraction:
    """Exact ``mu({2k}) = C_k (4/27)^k / C(4/27)``."""
    return critical_term(k) / C_AT_CRIT


def mu_mean_bounds(K: int = 200) -> tuple[Fraction, Fraction]:
    """Bracket of ``sum_k 2k mu({2k}) = 2 Chat / C``."""
    cv = critical_values(K)
    return 2 * cv.Chat_lower / cv.C_upper, 2 * cv.Chat_upper / cv.C_lower


def mu_mean_check(K: int = 200, tol: float = 1e-9) -> bool:
    lo, hi = mu_mean_bounds(K)
    return lo <= MU_MEAN <= hi and hi - lo < tol


def mu_tail_ratio(j: int) -> float:
    """``mu({2j}) * j^(5/2)``; tends to ``(108 pi)^(-1/2) ~ 0.0543``."""
    if j < 1:
        raise ValueError("j must be positive")
    return float(mu_pmf(j)) * j**2.5


def mu_tail_ratio_degree(j: int) -> float:
    """``mu({2j}) * (2j)^(5/2)``, the same tail measured in outdegree; tends to ``sqrt(8 / (27 pi))``."""
    return mu_tail_ratio(j) * 2**2.5


mu_tail_check = mu_tail_ratio
HALF_TAIL_CONSTANT = 1 / math.sqrt(108 * math.pi)


def mu_residual_bound(cap: int) -> Fraction:
    """Exact upper bound on ``1 - sum_{k<=cap} mu({2k})``."""
    return tail_bounds(cap + 1).upper / C_AT_CRIT


def log_mu(kmax: int) -> np.ndarray:
    """``log mu({2k})`` for ``k = 0..kmax`` in double precision."""
    k = np.arange(kmax + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logc = np.log(2.0) + gammaln(3 * k - 2) - gammaln(k + 1) - gammaln(2 * k)
    logc[0] = 0.0
    return np.log(0.75) + logc + k * math.log(4 / 27)
