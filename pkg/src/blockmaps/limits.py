"""Reference laws and goodness-of-fit statistics for the largest blocks.

Two families of normalisations live here.

``rescale_L1`` / ``rescale_Lk`` / ``frechet_type_cdf`` implement the stated
limit theorem literally: ``(L1 - n/3) / (c n^{2/3})`` against the stable law
``A`` with ``E exp(-tA) = exp(Gamma(-3/2) t^{3/2})``, and
``L_k / (s n^{2/3})`` against ``G^{-3/2}`` with ``G ~ Gamma(k-1)``, for
the two candidate scales ``s`` in :data:`SCALE_PRESETS`.

The ``condensation_*`` functions derive the normalisation directly from the
tail of the offspring law, ``mu({2j}) ~ h j^{-5/2}`` with
``h = (108 pi)^{-1/2}``: the 2n small summands form a stable sum, the giant
block is ``n/3`` minus that fluctuation, and the next blocks are the top
order statistics of ``2n`` iid values with tail ``(2h/3) j^{-3/2}``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.special import gammaincc, gammaincinv
from scipy.stats import kstwobign

ALPHA = 1.5
LAPLACE_CONST = 4 * math.sqrt(math.pi) / 3  # Gamma(-3/2)
TAIL_C = math.sqrt(8 / (27 * math.pi))

SCALE_PRESETS = {
    "theorem": (2 * math.pi / 3) ** (1 / 3),
    "proof": (3 * TAIL_C / 2) ** (2 / 3),
}

HALF_TAIL_C = 1 / math.sqrt(108 * math.pi)
CONDENSATION_L1_SCALE = (2 * HALF_TAIL_C) ** (2 / 3)
CONDENSATION_LK_SCALE = (4 * HALF_TAIL_C / 3) ** (2 / 3)


class StableSpec:
    """Totally right-skewed 3/2-stable law with ``E exp(-tA) = exp(gamma t^{3/2})``.

    In the one-parameter-per-feature (S1) convention ``S(alpha, 1, sigma, 0)``
    has ``E exp(-tX) = exp(-sigma^alpha t^alpha / cos(pi alpha / 2))``, so
    ``sigma = (gamma * |cos(3 pi / 4)|)^{2/3}``.
    """

    def __init__(self, gamma: float = LAPLACE_CONST):
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        self.gamma = gamma
        self.alpha = ALPHA
        self.sigma = (gamma * abs(math.cos(math.pi * ALPHA / 2))) ** (1 / ALPHA)
        t = math.tan(math.pi * ALPHA / 2)
        self._shift = math.atan(t) / ALPHA
        self._scale = (1 + t * t) ** (1 / (2 * ALPHA))

    def laplace(self, t):
        return np.exp(self.gamma * np.asarray(t, dtype=float) ** ALPHA)

    def sample(self, rng: np.random.Generator, size=None):
        """Chambers-Mallows-Stuck: one uniform angle and one exponential per variate."""
        a = self.alpha
        v = rng.uniform(-math.pi / 2, math.pi / 2, size)
        w = rng.standard_exponential(size)
        x = (self._scale * np.sin(a * (v + self._shift)) / np.cos(v) ** (1 / a)
             * (np.cos(v - a * (v + self._shift)) / w) ** ((1 - a) / a))
        return self.sigma * x


DEFAULT_STABLE = StableSpec()


def sample_stable(rng: np.random.Generator, size=None, spec: StableSpec = DEFAULT_STABLE):
    return spec.sample(rng, size)


def laplace_check(samples, t: float, spec: StableSpec = DEFAULT_STABLE) -> dict:
    """Monte Carlo ``E exp(-tA)`` against its closed form, in standard errors."""
    vals = np.exp(-t * np.asarray(samples, dtype=float))
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(len(vals)))
    target = float(spec.laplace(t))
    return {"t": t, "estimate": mean, "target": target, "se": se, "z": (mean - target) / se}


# -- literal theorem normalisation --------------------------------------------

def frechet_type_cdf(k: int, x):
    """``P(G^{-3/2} <= x) = Q(k-1, x^{-2/3})`` with ``G ~ Gamma(k-1)``; ``exp(-x^{-2/3})`` for ``k = 2``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(x > 0, gammaincc(k - 1, np.where(x > 0, x, 1.0) ** (-2 / 3)), 0.0)
    return out if out.ndim else float(out)


def frechet_type_median(k: int) -> float:
    return float(gammaincinv(k - 1, 0.5)) ** (-1.5)


def rescale_L1(value, n: int):
    """``(L - n/3) / (c n^{2/3})`` with ``c = (8 / (27 pi))^{1/2}``."""
    return (np.asarray(value, dtype=float) - n / 3) / (TAIL_C * n ** (2 / 3))


def resolve_scale(scale) -> float:
    if isinstance(scale, str):
        try:
            return SCALE_PRESETS[scale]
        except KeyError:
            raise ValueError(f"unknown scale preset {scale!r}") from None
    return float(scale)


def rescale_Lk(value, n: int, scale="proof"):
    """``L / (s n^{2/3})`` for a preset name or an explicit scale ``s``."""
    return np.asarray(value, dtype=float) / (resolve_scale(scale) * n ** (2 / 3))


def estimate_scale(values, n: int, k: int = 2) -> float:
    """Scale ``s`` matching the sample median of ``L_k / n^{2/3}`` to that of ``G_k^{-3/2}``."""
    return float(np.median(np.asarray(values, dtype=float) / n ** (2 / 3))) / frechet_type_median(k)


def discriminate(s_hat: float, presets: dict = SCALE_PRESETS) -> dict:
    """Nearest preset to ``s_hat`` and the ratio of distances (far / near)."""
    dist = {name: abs(s_hat - s) for name, s in presets.items()}
    ordered = sorted(dist, key=dist.get)
    near, far = ordered[0], ordered[-1]
    factor = math.inf if dist[near] == 0 else dist[far] / dist[near]
    return {"estimate": s_hat, "nearest": near, "distances": dist, "factor": factor}


# -- normalisation derived from the tail of mu -------------------------------

def condensation_rescale_L1(value, n: int):
    """``(n/3 - L) / ((2h)^{2/3} n^{2/3})``, which should approach ``A``."""
    return (n / 3 - np.asarray(value, dtype=float)) / (CONDENSATION_L1_SCALE * n ** (2 / 3))


def condensation_rescale_Lk(value, n: int):
    return np.asarray(value, dtype=float) / (CONDENSATION_LK_SCALE * n ** (2 / 3))


def condensation_frechet_cdf(k: int, x):
    """``P(G^{-2/3} <= x) = Q(k-1, x^{-3/2})``; ``exp(-x^{-3/2})`` for ``k = 2``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0, gammaincc(k - 1, np.where(x > 0, x, 1.0) ** (-1.5)), 0.0)
    return out if out.ndim else float(out)


# -- statistics ---------------------------------------------------------------

def ks_one_sample(samples, cdf: Callable) -> float:
    x = np.sort(np.asarray(samples, dtype=float))
    m = len(x)
    if m == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - f), np.max(f - (i - 1) / m)))


def ks_two_sample(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("empty sample")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def ks_threshold(m: int, level: float = 0.99, m2: int | None = None) -> float:
    """Asymptotic KS critical value for one sample of size ``m`` (or two samples)."""
    eff = m if m2 is None else m * m2 / (m + m2)
    return float(kstwobign.ppf(level)) / math.sqrt(eff)


def gamma_sample(shape: float, rng: np.random.Generator, size=None):
    if shape <= 0:
        raise ValueError("shape must be positive")
    return rng.standard_gamma(shape, size)


def stat_record(test: str, n: int, m: int, statistic: float, threshold: float) -> dict:
    return {"test": test, "n": n, "m": m, "statistic": statistic,
            "threshold": threshold, "pass": bool(statistic <= threshold)}
