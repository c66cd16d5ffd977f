import math

import numpy as np
import pytest
from scipy import stats

from blockmaps.limits import (CONDENSATION_L1_SCALE, CONDENSATION_LK_SCALE, LAPLACE_CONST,
                              SCALE_PRESETS, TAIL_C, StableSpec, condensation_frechet_cdf,
                              discriminate, estimate_scale, frechet_type_cdf, frechet_type_median,
                              gamma_sample, ks_one_sample, ks_threshold, ks_two_sample,
                              laplace_check, rescale_L1, rescale_Lk, resolve_scale,
                              sample_stable, stat_record)


def test_constants():
    assert LAPLACE_CONST == pytest.approx(math.gamma(-1.5))
    assert TAIL_C == pytest.approx(0.30711, abs=1e-5)
    assert SCALE_PRESETS["theorem"] == pytest.approx(1.27944, abs=1e-5)
    assert SCALE_PRESETS["proof"] == pytest.approx((2 / (3 * math.pi)) ** (1 / 3))
    assert CONDENSATION_L1_SCALE == pytest.approx(TAIL_C ** (2 / 3) / 2)
    assert CONDENSATION_LK_SCALE == pytest.approx((TAIL_C * 2**-2.5 * 4 / 3) ** (2 / 3))


def test_frechet_type_cdf():
    assert frechet_type_cdf(2, 1.0) == pytest.approx(math.exp(-1), abs=1e-12)
    assert frechet_type_cdf(2, 1e12) == pytest.approx(1.0, abs=1e-7)
    assert frechet_type_cdf(3, 1.0) == pytest.approx(2 * math.exp(-1), abs=1e-12)
    assert frechet_type_cdf(2, 0.0) == 0.0 and frechet_type_cdf(2, -3.0) == 0.0
    with pytest.raises(ValueError):
        frechet_type_cdf(1, 1.0)
    x = np.logspace(-3, 4, 200)
    for k in (2, 3, 5):
        f = frechet_type_cdf(k, x)
        assert np.all(np.diff(f) >= 0) and f[0] < 1e-6 and f[-1] > 0.95
    assert np.max(np.abs(frechet_type_cdf(2, x) - np.exp(-x ** (-2 / 3)))) < 1e-15
    assert frechet_type_cdf(2, frechet_type_median(2)) == pytest.approx(0.5)


def test_condensation_cdf():
    assert condensation_frechet_cdf(2, 1.0) == pytest.approx(math.exp(-1))
    assert condensation_frechet_cdf(3, 1.0) == pytest.approx(2 * math.exp(-1))


def test_rescaling():
    n = 10**6
    assert rescale_L1(n / 3, n) == 0
    assert rescale_L1(n / 3 + TAIL_C * 10**4, n) == pytest.approx(1.0)
    a, b = rescale_Lk(500.0, n, "theorem"), rescale_Lk(500.0, n, "proof")
    assert a / b == pytest.approx(SCALE_PRESETS["proof"] / SCALE_PRESETS["theorem"])
    assert rescale_Lk(500.0, n, 2.0) == pytest.approx(500 / (2 * 10**4))
    with pytest.raises(ValueError):
        resolve_scale("median")
    # affine / linear
    v = np.array([1.0, 2.0, 3.0])
    r = rescale_L1(v, 1000)
    assert np.allclose(np.diff(r), 1 / (TAIL_C * 100))


def test_ks_self_test_and_scipy_agreement():
    rng = np.random.default_rng(1)
    m = 2000
    x = rng.standard_normal(m)
    d = ks_one_sample(x, stats.norm.cdf)
    assert d < ks_threshold(m) and ks_threshold(m) == pytest.approx(1.628 / math.sqrt(m), abs=1e-3)
    assert d == pytest.approx(stats.kstest(x, "norm").statistic, abs=1e-12)
    y = rng.standard_normal(1500) + 0.1
    assert ks_two_sample(x, y) == pytest.approx(stats.ks_2samp(x, y).statistic, abs=1e-12)
    assert ks_two_sample(x, x) == 0
    assert ks_two_sample(np.zeros(5), np.ones(7)) == 1
    with pytest.raises(ValueError):
        ks_one_sample([], stats.norm.cdf)


def test_gamma_sample():
    rng = np.random.default_rng(2)
    assert abs(gamma_sample(1, rng, 10**6).mean() - 1) < 0.004
    assert abs(gamma_sample(2, rng, 10**6).mean() - 2) < 0.006
    g = gamma_sample(1, rng, 2000)
    assert ks_one_sample(g ** -1.5, lambda x: frechet_type_cdf(2, x)) < ks_threshold(2000)
    with pytest.raises(ValueError):
        gamma_sample(0, rng)


def test_stable_laplace_and_support():
    rng = np.random.default_rng(3)
    a = sample_stable(rng, 2 * 10**5)
    for t in (0.25, 0.5, 1.0):
        assert abs(laplace_check(a, t)["z"]) < 3
    assert 0 < np.mean(a > 0) < 1
    with pytest.raises(ValueError):
        StableSpec(-1.0)


def test_stable_scale_matters():
    # a mis-calibrated scale is caught by the same check
    rng = np.random.default_rng(4)
    wrong = StableSpec(LAPLACE_CONST * 1.3)
    a = wrong.sample(rng, 2 * 10**5)
    assert abs(laplace_check(a, 1.0)["z"]) > 3


def test_scale_estimate_and_discrimination():
    rng = np.random.default_rng(5)
    n = 10**5
    s_true = SCALE_PRESETS["proof"]
    Lk = s_true * n ** (2 / 3) * gamma_sample(1, rng, 4000) ** -1.5
    s_hat = estimate_scale(Lk, n, 2)
    assert s_hat == pytest.approx(s_true, rel=0.1)
    v = discriminate(s_hat)
    assert v["nearest"] == "proof" and v["factor"] > 1.5
    assert discriminate(SCALE_PRESETS["theorem"])["factor"] == math.inf


def test_stat_record():
    r = stat_record("x", 10, 20, 0.05, 0.08)
    assert r == {"test": "x", "n": 10, "m": 20, "statistic": 0.05, "threshold": 0.08, "pass": True}
