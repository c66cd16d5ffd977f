"""Exact sampling of block sizes through conditioned Galton-Watson trees.

The block tree of a uniform map with ``n`` edges is a Galton-Watson tree with
offspring law ``mu({2k}) = (3/4) C_k (4/27)^k`` conditioned to have ``2n+1``
nodes.  Its outdegree sequence, read in depth-first order, is a cyclic
rotation of ``2n+1`` iid ``mu`` variables conditioned to sum to ``2n``; the
rotation is the unique one with a valid Lukasiewicz path.

``mu`` has mean ``2/3``, so the conditioning is a large deviation of a
heavy-tailed sum: one value carries about a third of the mass.  Plain
rejection needs ``Theta(n^{3/2})`` trials, so :class:`ConditionedSampler`
uses an exact rejection sampler with a two-part envelope instead:

* *big jump*: a uniform position ``J`` receives the remainder
  ``R = n - (sum of the 2n other iid draws)`` (in half-degrees).  On
  configurations whose maximum ``R >= r0`` sits first at ``J`` the density
  ratio to the target is ``N mu(R) <= N mu(r0)``; accept with probability
  ``mu(R) / mu(r0)``.
* *tilted*: all ``N`` values iid from ``mu(k) exp(theta k)`` restricted to
  ``k < r0``; on configurations summing to ``n`` the ratio is the constant
  ``phi(theta)^N exp(-theta n)``, so accept iff the sum is right.

The two parts cover disjoint regions (maximum ``>= r0`` or ``< r0``), and the
part is picked with probability proportional to its bound, which makes the
accepted configuration exactly distributed (up to the double precision of the
sampling tables).  ``r0`` and ``theta`` are chosen to minimise the total
envelope mass.  Forcing ``r0 = n + 1`` and ``theta = 0`` gives plain
rejection.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from .counting import log_mu, mu_pmf, mu_residual_bound

SEED_BITS = 64


# -- offspring law tables -----------------------------------------------------

@dataclass(frozen=True)
class SamplingTable:
    """Float CDF of ``mu`` over half-degrees ``0..cap`` plus an exact bound on the rest."""
    cap: int
    pmf: np.ndarray
    cdf: np.ndarray
    residual: Fraction

    @property
    def degrees(self) -> np.ndarray:
        return 2 * np.arange(self.cap + 1)


def mu_cdf_table(cap: int) -> SamplingTable:
    """Sampling table over outdegrees ``0, 2, ..., 2 cap``.

    For conditioned trees with ``n`` edges ``cap = n`` is enough, as no
    outdegree can exceed ``2n``.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    pmf = np.exp(log_mu(cap))
    cdf = np.cumsum(pmf)
    return SamplingTable(cap, pmf, cdf, mu_residual_bound(cap))


@lru_cache(maxsize=8)
def _exact_mass(cap: int) -> Fraction:
    return sum((mu_pmf(k) for k in range(cap + 1)), Fraction(0))


def _invert_exact(table: SamplingTable, u: float) -> int:
    target = Fraction(u)
    acc = _exact_mass(table.cap)
    k = table.cap
    while acc <= target:
        k += 1
        acc += mu_pmf(k)
    return k


def sample_offspring(table: SamplingTable, rng: np.random.Generator) -> int:
    """One draw from ``mu`` (an even outdegree).

    Draws falling past the table are resolved by exact rational inversion.
    """
    u = rng.random()
    k = int(np.searchsorted(table.cdf, u, side="right"))
    if k <= table.cap:
        return 2 * k
    return 2 * _invert_exact(table, u)


def sample_offspring_many(table: SamplingTable, rng: np.random.Generator, size: int,
                          exact_tail: bool = False) -> np.ndarray:
    """Vectorised half-degree draws.

    Values past the table come back as ``cap + 1`` unless ``exact_tail`` is
    set, in which case they are resolved like :func:`sample_offspring`.
    """
    u = rng.random(size)
    k = np.searchsorted(table.cdf, u, side="right")
    if exact_tail:
        for i in np.flatnonzero(k > table.cap):
            k[i] = _invert_exact(table, float(u[i]))
    return k


# -- sequences and trees ------------------------------------------------------

@dataclass(frozen=True)
class DegreeSequence:
    """``2n + 1`` even outdegrees summing to ``2n``."""
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int64)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or len(v) % 2 != 1:
            raise ValueError("degree sequence must have odd length 2n+1")
        if np.any(v < 0) or np.any(v % 2):
            raise ValueError("degrees must be even and non-negative")
        if int(v.sum()) != len(v) - 1:
            raise ValueError("degrees must sum to length - 1")

    @property
    def n(self) -> int:
        return (len(self.values) - 1) // 2

    def __eq__(self, other):
        return isinstance(other, DegreeSequence) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(tuple(self.values.tolist()))


def cycle_shift(seq: DegreeSequence) -> int:
    """Start index of the unique rotation whose Lukasiewicz path first hits -1 at the end."""
    if not isinstance(seq, DegreeSequence):
        seq = DegreeSequence(seq)
    walk = np.cumsum(seq.values - 1)
    return (int(np.argmin(walk)) + 1) % len(walk)


def rotate(seq: DegreeSequence, r: int) -> np.ndarray:
    return np.roll(seq.values, -r)


def is_lukasiewicz(degrees) -> bool:
    d = np.asarray(degrees, dtype=np.int64)
    if len(d) == 0:
        return False
    walk = np.cumsum(d - 1)
    return bool(walk[-1] == -1 and np.all(walk[:-1] >= 0))


class OrderedTree:
    """Plane tree given by its outdegrees in depth-first order."""

    def __init__(self, outdegrees):
        d = np.asarray(outdegrees, dtype=np.int64)
        if not is_lukasiewicz(d):
            raise ValueError("not a Lukasiewicz sequence")
        self.outdegrees = d

    def __len__(self):
        return len(self.outdegrees)

    def __eq__(self, other):
        return isinstance(other, OrderedTree) and np.array_equal(self.outdegrees, other.outdegrees)

    def __hash__(self):
        return hash(tuple(self.outdegrees.tolist()))

    def __repr__(self):
        return f"OrderedTree({self.outdegrees.tolist()})"

    def children(self) -> list[list[int]]:
        """Child lists (node indices in depth-first order)."""
        kids = [[] for _ in range(len(self.outdegrees))]
        stack = []
        for i, deg in enumerate(self.outdegrees.tolist()):
            if stack:
                parent = stack[-1]
                kids[parent].append(i)
                if len(kids[parent]) == self.outdegrees[parent]:
                    stack.pop()
            if deg:
                stack.append(i)
        return kids

    def nested(self):
        """The tree as nested tuples of children."""
        kids = self.children()

        def build(i):
            return tuple(build(c) for c in kids[i])
        return build(0)


def tree_from_degrees(degrees) -> OrderedTree:
    return OrderedTree(degrees)


# -- conditioned sampling -----------------------------------------------------

@dataclass(frozen=True)
class EnvelopeParams:
    threshold: int  # r0, in half-degrees; n + 1 disables the big-jump part
    tilt: float
    log_w_big: float
    log_w_tilt: float

    @property
    def p_big(self) -> float:
        if self.log_w_big == -math.inf:
            return 0.0
        return 1.0 / (1.0 + math.exp(self.log_w_tilt - self.log_w_big))


def _log_w_tilt(logmu: np.ndarray, r0: int, theta: float, N: int, n: int) -> float:
    k = np.arange(r0)
    return float(N * logsumexp(logmu[:r0] + theta * k) - theta * n)


def _log_w_big(logmu: np.ndarray, r0: int, N: int, n: int) -> float:
    if r0 > n:
        return -math.inf
    return math.log(N) + float(logmu[r0])


def choose_envelope(n: int, logmu: np.ndarray) -> EnvelopeParams:
    N = 2 * n + 1
    if n <= 400:
        candidates = range(1, n + 2)
    else:
        candidates = sorted({max(1, int(f * n)) for f in np.linspace(0.02, 0.6, 59)} | {n + 1})
    best = None
    for r0 in candidates:
        if r0 > n:
            theta = 0.0
        else:
            res = minimize_scalar(lambda t: _log_w_tilt(logmu, r0, t, N, n), bounds=(0.0, 10.0), method="bounded")
            theta = float(res.x) if res.fun < _log_w_tilt(logmu, r0, 0.0, N, n) else 0.0
        lt = _log_w_tilt(logmu, r0, theta, N, n)
        lb = _log_w_big(logmu, r0, N, n)
        total = np.logaddexp(lb, lt)
        if best is None or total < best[0]:
            best = (total, EnvelopeParams(r0, theta, lb, lt))
    return best[1]


class ConditionedSampler:
    """Exact sampler of ``2n+1`` iid ``mu`` outdegrees conditioned to sum to ``2n``.

    ``threshold`` and ``tilt`` override the automatically chosen envelope
    (useful to exercise both proposal parts at small ``n``).
    """

    def __init__(self, n: int, threshold: int | None = None, tilt: float | None = None):
        if n < 1:
            raise ValueError("n must be at least 1")
        self.n = n
        self.N = 2 * n + 1
        self.logmu = log_mu(n + 1)
        if threshold is None:
            self.params = choose_envelope(n, self.logmu)
        else:
            if not 1 <= threshold <= n + 1:
                raise ValueError("threshold must lie in 1..n+1")
            theta = 0.0 if tilt is None else float(tilt)
            self.params = EnvelopeParams(
                threshold, theta,
                _log_w_big(self.logmu, threshold, self.N, n),
                _log_w_tilt(self.logmu, threshold, theta, self.N, n),
            )
        pmf = np.exp(self.logmu[: n + 1])
        self.cdf = np.cumsum(pmf)
        r0 = self.params.threshold
        lt = self.logmu[:r0] + self.params.tilt * np.arange(r0)
        tilted = np.exp(lt - logsumexp(lt))
        self.tilted_cdf = np.cumsum(tilted)
        self.tilted_cdf[-1] = max(self.tilted_cdf[-1], 1.0)

    def _try_big(self, rng: np.random.Generator) -> np.ndarray | None:
        n, N = self.n, self.N
        r0 = self.params.threshold
        j = int(rng.integers(N))
        others = np.searchsorted(self.cdf, rng.random(N - 1), side="right")
        rest = int(others.sum())
        big = n - rest
        if big < r0:
            return None
        if j and others[:j].max() >= big:
            return None
        if j < N - 1 and others[j:].max() > big:
            return None
        if rng.random() >= math.exp(self.logmu[big] - self.logmu[r0]):
            return None
        return np.insert(others, j, big)

    def _try_tilted(self, rng: np.random.Generator) -> np.ndarray | None:
        vals = np.searchsorted(self.tilted_cdf, rng.random(self.N), side="right")
        if int(vals.sum()) != self.n:
            return None
        return vals

    def sample_half(self, rng: np.random.Generator) -> tuple[np.ndarray, int]:
        """Half-degrees (block sizes incl. zeros) and the number of proposals used."""
        p_big = self.params.p_big
        trials = 0
        while True:
            trials += 1
            if rng.random() < p_big:
                out = self._try_big(rng)
            else:
                out = self._try_tilted(rng)
            if out is not None:
                return out.astype(np.int64), trials

    def sample(self, rng: np.random.Generator) -> tuple[DegreeSequence, int]:
        half, trials = self.sample_half(rng)
        return DegreeSequence(2 * half), trials


_SAMPLERS: dict[int, ConditionedSampler] = {}


def get_sampler(n: int) -> ConditionedSampler:
    if n not in _SAMPLERS:
        _SAMPLERS[n] = ConditionedSampler(n)
    return _SAMPLERS[n]


def sample_conditioned(n: int, rng: np.random.Generator) -> tuple[DegreeSequence, int]:
    """``2n+1`` iid ``mu`` outdegrees conditioned on summing to ``2n``, with the trial count."""
    return get_sampler(n).sample(rng)


def sample_tree(n: int, rng: np.random.Generator) -> tuple[OrderedTree, int]:
    seq, trials = sample_conditioned(n, rng)
    return tree_from_degrees(rotate(seq, cycle_shift(seq))), trials


@dataclass(frozen=True)
class BlockSizeSample:
    n: int
    sizes: tuple
    seed: int | None = None
    rejection_trials: int = 0
    replica: int = 0
    index: int = 0


def block_sizes(n: int, rng: np.random.Generator, seed: int | None = None) -> BlockSizeSample:
    """Descending block sizes (edge counts) of a uniform random map with ``n`` edges."""
    tree, trials = sample_tree(n, rng)
    d = tree.outdegrees
    sizes = np.sort(d[d > 0] // 2)[::-1]
    return BlockSizeSample(n, tuple(sizes.tolist()), seed, trials)


def sample_map(n: int, rng: np.random.Generator, cap: int = 6):
    """Uniform random rooted map with ``n`` edges (small ``n`` only)."""
    from .blocks import BlockTree, assemble
    from .oracle import two_connected_maps

    if n > cap or n > 6:
        raise ValueError("block enumeration cap exceeded")
    if n == 0:
        from .maps import TRIVIAL
        return TRIVIAL
    tree, _ = sample_tree(n, rng)
    degrees = tree.outdegrees.tolist()
    kids = tree.children()
    chosen = []
    for deg in degrees:
        pool = two_connected_maps(deg // 2)
        chosen.append(pool[int(rng.integers(len(pool)))])

    def build(i):
        return BlockTree(chosen[i], tuple(build(c) for c in kids[i]))
    return assemble(build(0))


# -- reproducible Monte Carlo driver -----------------------------------------

def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed of sample ``index``: numpy ``SeedSequence(master, spawn_key=(index,))``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _run_replica(args) -> list[BlockSizeSample]:
    n, replica, per_replica, master_seed, top = args
    out = []
    for j in range(per_replica):
        g = replica * per_replica + j
        seed = derive_seed(master_seed, g)
        s = block_sizes(n, rng_from_seed(seed), seed)
        sizes = s.sizes if top is None else s.sizes[:top]
        out.append(BlockSizeSample(n, sizes, seed, s.rejection_trials, replica, j))
    return out


def montecarlo(n: int, replicas: int, per_replica: int, master_seed: int,
               workers: int = 1, top: int | None = None) -> list[BlockSizeSample]:
    """Block-size samples ordered by (replica, sample).

    Sample ``j`` of replica ``r`` uses the global index ``r * per_replica + j``
    to derive its seed, so results do not depend on ``workers`` and only the
    replica labels depend on how the work is split.
    """
    if min(n, replicas, per_replica) < 1:
        raise ValueError("n, replicas and samples per replica must be positive")
    jobs = [(n, r, per_replica, master_seed, top) for r in range(replicas)]
    if workers <= 1 or replicas == 1:
        chunks = [_run_replica(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_replica, jobs))
    return [s for chunk in chunks for s in chunk]


def iter_montecarlo(n: int, replicas: int, per_replica: int, master_seed: int,
                    top: int | None = None) -> Iterator[BlockSizeSample]:
    for r in range(replicas):
        yield from _run_replica((n, r, per_replica, master_seed, top))
