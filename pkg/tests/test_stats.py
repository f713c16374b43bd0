import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopsoup._rng import stream
from loopsoup.stats import (
    InsufficientData,
    chi_square_uniform,
    independence_corr,
    normal_interval,
    poisson_gof,
    spearman_monotone,
    wilson_interval,
    within_sigma,
)


def test_wilson_zero_successes():
    r = wilson_interval(0, 100)
    assert r.estimate == 0 and r.ci_low == 0
    # z^2 / (n + z^2) with z = 1.959964
    assert r.ci_high == pytest.approx(1.959964**2 / (100 + 1.959964**2), rel=1e-6)
    assert r.ci_high == pytest.approx(0.0370, abs=5e-5)


def test_wilson_symmetry_and_guard():
    a, b = wilson_interval(30, 100), wilson_interval(70, 100)
    assert a.ci_low == pytest.approx(1 - b.ci_high)
    with pytest.raises(ValueError):
        wilson_interval(5, 3)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 500).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))))
def test_wilson_contains_estimate(kn):
    k, n = kn
    r = wilson_interval(k, n)
    assert 0 <= r.ci_low <= r.estimate <= r.ci_high <= 1


def test_normal_interval():
    r = normal_interval([1.0, 2.0, 3.0])
    assert r.estimate == 2.0 and r.ci_high - r.estimate == pytest.approx(1.959964 * 1 / math.sqrt(3), rel=1e-5)


def test_poisson_gof_accepts_and_rejects():
    rng = stream(0, 50)
    good = rng.poisson(0.4, 20000)
    assert poisson_gof(good, 0.4).p_value > 0.001
    bad = rng.poisson(0.5, 20000)
    assert poisson_gof(bad, 0.4).p_value < 1e-6
    with pytest.raises(InsufficientData):
        poisson_gof([0, 0, 0], 0.1)


def test_chi_square_uniform():
    assert chi_square_uniform([25, 25, 25, 25]).p_value == pytest.approx(1.0)
    assert chi_square_uniform([100, 0, 0, 0]).p_value < 1e-10


def test_spearman_exact_small():
    r = spearman_monotone([1, 2, 3, 4], [4, 3, 2, 1])
    assert r.statistic == pytest.approx(-1.0)
    assert r.p_value == pytest.approx(1 / 24)
    assert "exact" in r.binning


def test_spearman_sampled_six_points():
    r = spearman_monotone([1, 2, 3, 4, 5, 6], [6, 5, 4, 3, 2, 1], permutations=500, seed=3)
    # exact p is 1/720; with 500 random permutations the reported p is (hits + 1) / 501
    assert r.p_value <= 3 / 501
    one_swap = spearman_monotone([1, 2, 3, 4, 5, 6], [6, 5, 3, 4, 2, 1], permutations=20000, seed=3)
    assert one_swap.p_value < 0.01


def test_spearman_guard():
    with pytest.raises(InsufficientData):
        spearman_monotone([1, 2, 3], [3, 2, 1])


def test_independence_corr():
    rng = stream(1, 50)
    x = rng.normal(size=2000)
    assert independence_corr(x, rng.normal(size=2000)).p_value > 0.001
    assert independence_corr(x, x + 0.1 * rng.normal(size=2000)).p_value < 1e-10
    assert "zero-variance" in independence_corr(np.zeros(40), x[:40]).flags


def test_within_sigma():
    assert within_sigma(1.0, 1.2, 0.1)
    assert not within_sigma(1.0, 1.4, 0.1)
    assert within_sigma(1.0, 1.0, 0.0)
