import itertools
from collections import Counter

import numpy as np
import pytest

from blockmaps.counting import log_mu, mu_pmf, mu_residual_bound
from blockmaps.maps import canonical, is_valid
from blockmaps.oracle import enum_maps, exact_tree_law
from blockmaps.sampler import (ConditionedSampler, DegreeSequence, block_sizes, cycle_shift,
                               derive_seed, is_lukasiewicz, montecarlo, mu_cdf_table, rotate,
                               sample_conditioned, sample_map, sample_offspring,
                               sample_offspring_many, tree_from_degrees)


def tv(counts, law, total):
    keys = set(counts) | set(law)
    return 0.5 * sum(abs(counts.get(k, 0) / total - float(law.get(k, 0))) for k in keys)


def test_cdf_table():
    t = mu_cdf_table(2)
    assert np.allclose(t.cdf, np.cumsum([0.75, 2 / 9, 4 / 243]))
    assert t.degrees.tolist() == [0, 2, 4]
    with pytest.raises(ValueError):
        mu_cdf_table(0)
    assert 1 - float(sum(mu_pmf(k) for k in range(3))) <= float(mu_residual_bound(2))


def test_offspring_frequencies():
    rng = np.random.default_rng(3)
    t = mu_cdf_table(2000)
    h = sample_offspring_many(t, rng, 10**6, exact_tail=True)
    assert abs(np.mean(h == 0) - 0.75) < 0.002
    assert abs(np.mean(h == 1) - 2 / 9) < 0.002
    # the raw mean has infinite variance; compare min(X, T) with its exact mean instead
    T = 200
    p = np.array([float(mu_pmf(k)) for k in range(T)])
    tail = 1 - p.sum()
    k = np.arange(T)
    mean = (k * p).sum() + T * tail
    var = (k**2 * p).sum() + T**2 * tail - mean**2
    assert abs(np.minimum(h, T).mean() - mean) < 4 * np.sqrt(var / len(h))
    assert abs(2 * mean - 2 / 3) < 0.02


def test_offspring_fallback_past_cap():
    rng = np.random.default_rng(4)
    t = mu_cdf_table(1)
    draws = np.array([sample_offspring(t, rng) for _ in range(40000)])
    assert set(np.unique(draws) % 2) == {0}
    p_big = 1 - 3 / 4 - 2 / 9
    sd = np.sqrt(p_big * (1 - p_big) / len(draws))
    assert abs(np.mean(draws > 2) - p_big) < 4 * sd
    assert abs(np.mean(draws == 4) - 4 / 243) < 4 * np.sqrt(4 / 243 / len(draws))


def test_degree_sequence_validation():
    DegreeSequence([2, 0, 0])
    for bad in ([0, 0, 4, 0, 2], [1, 0, 0], [2, 0], [4, 0, 0]):
        with pytest.raises(ValueError):
            DegreeSequence(bad)


def test_cycle_shift_examples():
    assert cycle_shift(DegreeSequence([0, 2, 0])) == 1
    assert rotate(DegreeSequence([0, 2, 0]), 1).tolist() == [2, 0, 0]
    assert cycle_shift(DegreeSequence([2, 0, 0])) == 0
    with pytest.raises(ValueError):
        cycle_shift([0, 0, 4, 0, 2])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cycle_lemma_exhaustive(n):
    length = 2 * n + 1
    for comp in itertools.product(range(n + 1), repeat=length):
        if sum(comp) != n:
            continue
        seq = DegreeSequence([2 * c for c in comp])
        valid = [r for r in range(length) if is_lukasiewicz(rotate(seq, r))]
        assert valid == [cycle_shift(seq)]


def test_tree_from_degrees():
    assert tree_from_degrees([2, 0, 0]).nested() == ((), ())
    assert tree_from_degrees([2, 2, 0, 0, 0]).nested() == (((), ()), ())
    assert tree_from_degrees([4, 0, 0, 0, 0]).nested() == ((), (), (), ())
    with pytest.raises(ValueError):
        tree_from_degrees([0, 2, 0])


def test_conditioned_n1_uniform():
    rng = np.random.default_rng(5)
    c = Counter(tuple(sample_conditioned(1, rng)[0].values.tolist()) for _ in range(30000))
    assert set(c) == {(2, 0, 0), (0, 2, 0), (0, 0, 2)}
    sd = np.sqrt(1 / 3 * 2 / 3 / 30000)
    assert all(abs(v / 30000 - 1 / 3) < 4 * sd for v in c.values())


def _tree_tv(sampler, n, draws, seed):
    rng = np.random.default_rng(seed)
    c = Counter()
    for _ in range(draws):
        seq, _ = sampler.sample(rng)
        assert len(seq.values) == 2 * n + 1 and seq.values.sum() == 2 * n
        c[tuple(rotate(seq, cycle_shift(seq)).tolist())] += 1
    return tv(c, exact_tree_law(n), draws)


@pytest.mark.parametrize("threshold,tilt", [(None, None), (4, 0.0), (1, 0.5), (2, 0.3), (3, 1.2)])
def test_envelope_parts_exact_n3(threshold, tilt):
    s = ConditionedSampler(3, threshold=threshold, tilt=tilt)
    assert _tree_tv(s, 3, 30000, 7) < 0.02


def test_plain_rejection_override():
    s = ConditionedSampler(5, threshold=6, tilt=0.0)
    assert s.params.p_big == 0.0
    assert _tree_tv(s, 5, 20000, 8) < 0.05
    with pytest.raises(ValueError):
        ConditionedSampler(5, threshold=7)


def _polypow(a, power, deg):
    out = np.zeros(deg + 1)
    out[0] = 1.0
    base = a[: deg + 1].copy()
    while power:
        if power & 1:
            out = np.convolve(out, base)[: deg + 1]
        base = np.convolve(base, base)[: deg + 1]
        power >>= 1
    return out


def _exact_top_two(n):
    """CDFs of the largest and second largest of 2n+1 iid mu values summing to n (half-degrees)."""
    N = 2 * n + 1
    mu = np.exp(log_mu(n))
    total = _polypow(mu, N, n)[n]
    F1, F2 = [], []
    for m in range(n + 1):
        A = mu.copy()
        A[m + 1:] = 0
        B = mu - A
        AN, AN1 = _polypow(A, N, n), _polypow(A, N - 1, n)
        F1.append(AN[n] / total)
        F2.append((AN[n] + N * np.convolve(B, AN1)[n]) / total)
    return np.array(F1), np.array(F2)


def test_top_two_law_matches_convolution_n40():
    n, draws = 40, 20000
    s = ConditionedSampler(n)
    assert 0 < s.params.p_big < 1  # both envelope parts are in use
    rng = np.random.default_rng(9)
    top = np.array([np.sort(s.sample_half(rng)[0])[::-1][:2] for _ in range(draws)])
    F1, F2 = _exact_top_two(n)
    grid = np.arange(n + 1)
    band = 1.63 / np.sqrt(draws)
    for col, F in ((0, F1), (1, F2)):
        emp = np.searchsorted(np.sort(top[:, col]), grid, side="right") / draws
        assert np.max(np.abs(emp - F)) < band


def test_block_sizes_small():
    rng = np.random.default_rng(10)
    assert all(block_sizes(1, rng).sizes == (1,) for _ in range(100))
    c = Counter(block_sizes(2, rng).sizes for _ in range(20000))
    assert set(c) == {(2,), (1, 1)}
    sd = np.sqrt(1 / 9 * 8 / 9 / 20000)
    assert abs(c[(2,)] / 20000 - 1 / 9) < 4 * sd
    for n in (7, 50, 300):
        s = block_sizes(n, rng)
        assert sum(s.sizes) == n and list(s.sizes) == sorted(s.sizes, reverse=True)
        assert min(s.sizes) >= 1 and s.rejection_trials >= 1


def test_sample_map_uniform():
    rng = np.random.default_rng(12)
    c = Counter(canonical(sample_map(1, rng)) for _ in range(4000))
    assert len(c) == 2 and abs(max(c.values()) / 4000 - 0.5) < 4 * np.sqrt(0.25 / 4000)
    draws = 27000
    c = Counter(canonical(sample_map(2, rng)) for _ in range(draws))
    assert set(c) == set(enum_maps(2))
    sd = np.sqrt(1 / 9 * 8 / 9 / draws)
    assert all(abs(v / draws - 1 / 9) < 4 * sd for v in c.values())
    m = sample_map(6, rng)
    assert is_valid(m) and m.num_edges == 6
    with pytest.raises(ValueError, match="block enumeration cap exceeded"):
        sample_map(7, rng)


def test_montecarlo_determinism_and_splitting():
    a = montecarlo(30, 1, 8, master_seed=99)
    b = montecarlo(30, 1, 8, master_seed=99)
    assert a == b
    c = montecarlo(30, 4, 2, master_seed=99)
    assert [s.sizes for s in a] == [s.sizes for s in c]
    assert [s.seed for s in a] == [s.seed for s in c]
    assert [(s.replica, s.index) for s in c[:3]] == [(0, 0), (0, 1), (1, 0)]
    d = montecarlo(30, 4, 2, master_seed=99, workers=2)
    assert c == d
    assert a[0].seed == derive_seed(99, 0)
    with pytest.raises(ValueError):
        montecarlo(30, 0, 2, master_seed=1)


def test_mean_giant_block_n1e4():
    samples = montecarlo(10**4, 1, 2000, master_seed=2024)
    mean = np.mean([s.sizes[0] for s in samples]) / 10**4
    assert 1 / 3 - 0.02 <= mean <= 1 / 3 + 0.02
