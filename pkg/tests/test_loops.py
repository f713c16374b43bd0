import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from loopsoup._rng import stream
from loopsoup.lattice import build_domain
from loopsoup.loops import (
    BudgetExceeded,
    InvalidConfig,
    RwLoop,
    SoupConfig,
    return_probability,
    rooted_mass,
    sample_bridge,
    sample_loop_soup,
    soup_distance,
    tail_mass,
)
from loopsoup.serialize import dumps, sample_to_dict

from conftest import square_loop

STEPS = [(1, 0), (0, 1), (-1, 0), (0, -1)]


def closed_walks(n):
    """All closed n-step walks from the origin, as tuples of positions."""
    out = []
    for steps in itertools.product(STEPS, repeat=n):
        if sum(s[0] for s in steps) == 0 and sum(s[1] for s in steps) == 0:
            pos = [(0, 0)]
            for dx, dy in steps[:-1]:
                pos.append((pos[-1][0] + dx, pos[-1][1] + dy))
            out.append(tuple(pos))
    return out


def test_return_probability_by_enumeration():
    assert return_probability(2) == Fraction(1, 4) == Fraction(len(closed_walks(2)), 4**2)
    assert return_probability(4) == Fraction(9, 64) == Fraction(len(closed_walks(4)), 4**4)
    assert return_probability(6) == Fraction(len(closed_walks(6)), 4**6)


@pytest.mark.parametrize("bad", [0, -2, 3])
def test_return_probability_guard(bad):
    with pytest.raises(ValueError):
        return_probability(bad)


def test_rooted_mass_values():
    np.testing.assert_allclose(rooted_mass(np.array([2, 4])), [1 / 8, 9 / 256], rtol=1e-14)
    np.testing.assert_allclose(rooted_mass(np.array([200]), 0.5), 0.5 * float(return_probability(200)) / 200, rtol=1e-11)


def test_tail_mass_matches_direct_sum():
    direct = sum(float(return_probability(L)) / L for L in range(52, 4001, 2))
    # remaining tail beyond 4000 from the asymptotic 1/(2 pi n^2) density
    direct += 1 / (2 * math.pi * 2000)
    assert tail_mass(50) == pytest.approx(direct, rel=1e-3)
    assert tail_mass(50, 2.0) == pytest.approx(2 * tail_mass(50))


def test_rwloop_validation():
    RwLoop([(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        RwLoop([(0, 0), (1, 0), (1, 1)])
    with pytest.raises(ValueError):
        RwLoop([(0, 0), (2, 0)])
    loop = RwLoop(square_loop(0, 0, 2))
    assert loop.length == 8 and len(loop.trace) == 8 and loop.root == (0, 0)


def test_bridge_length_two_uniform():
    d = build_domain("disk", radius=8)
    rng = stream(1, 99)
    counts = {}
    for _ in range(4000):
        loop = sample_bridge((0, 0), 2, d, rng)
        key = tuple(map(tuple, loop.sites.tolist()))
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 4
    assert sps.chisquare(list(counts.values())).pvalue > 0.001


def test_bridge_length_four_uniform_over_36():
    oracle = closed_walks(4)
    assert len(oracle) == 36
    d = build_domain("disk", radius=8)
    rng = stream(2, 99)
    index = {w: i for i, w in enumerate(oracle)}
    counts = np.zeros(36)
    for _ in range(300):
        for _ in range(60):
            counts[index[tuple(map(tuple, sample_bridge((0, 0), 4, d, rng).sites.tolist()))]] += 1
    assert sps.chisquare(counts).pvalue > 0.001


def test_bridge_budget():
    # a box one site wide and tall has no room for any step
    d = build_domain("box", width=1, height=1)
    loop = sample_bridge((0, 0), 2, d, stream(0, 1))
    assert loop.length == 2
    with pytest.raises(BudgetExceeded):
        sample_bridge((0, 0), 40, d, stream(0, 1), budget=50)


def test_bridge_rejects_bad_input():
    d = build_domain("disk", radius=8)
    with pytest.raises(ValueError):
        sample_bridge((0, 0), 3, d, stream(0, 1))
    with pytest.raises(ValueError):
        sample_bridge((20, 0), 2, d, stream(0, 1))


def test_config_validation():
    d = build_domain("disk", radius=8)
    for kw in (dict(c=-1), dict(c=1, cutoff=3), dict(c=1, cutoff=0), dict(c=1, cutoff=4, n_max=2), dict(c=1, n_max=11)):
        with pytest.raises(InvalidConfig):
            SoupConfig(d, **kw)
    assert SoupConfig(d, 1.0).n_max == 128


def test_zero_intensity_is_empty():
    s = sample_loop_soup(SoupConfig(build_domain("disk", radius=8), 0.0, seed=5))
    assert len(s) == 0 and len(s.draws) == 0


def test_sample_invariants():
    d = build_domain("disk", radius=12)
    s = sample_loop_soup(SoupConfig(d, 1.0, cutoff=4, n_max=60, seed=3))
    assert len(s) > 0
    for loop in s.loops:
        assert 4 <= loop.length <= 60
        assert d.contains(loop.sites[:, 0], loop.sites[:, 1]).all()
    assert (s.draws[:, 3] == 1).sum() == len(s)


def test_determinism():
    cfg = SoupConfig(build_domain("disk", radius=12), 1.0, seed=11)
    assert dumps(sample_to_dict(sample_loop_soup(cfg))) == dumps(sample_to_dict(sample_loop_soup(cfg)))
    assert dumps(sample_to_dict(sample_loop_soup(cfg.with_seed(12)))) != dumps(sample_to_dict(sample_loop_soup(cfg)))


def pooled_counts(domain, c, length, seeds, n_max=None):
    cfg = SoupConfig(domain, c, cutoff=2, n_max=n_max or 8)
    return np.concatenate([sample_loop_soup(cfg.with_seed(s)).cell_counts(length, accepted_only=False)
                           for s in seeds])


def test_length_two_mean_and_dispersion_small():
    d = build_domain("box", width=30, height=30)
    counts = pooled_counts(d, 1.0, 2, range(12))
    n = len(counts)
    assert abs(counts.mean() - 1 / 8) < 3 * math.sqrt(1 / 8 / n)
    assert 0.9 < counts.var() / counts.mean() < 1.1


def test_superposition_in_law():
    # soup(c1) + soup(c2) has the per-cell count law of soup(c1 + c2)
    d = build_domain("box", width=20, height=20)
    a = pooled_counts(d, 0.4, 2, range(0, 20)) + pooled_counts(d, 0.6, 2, range(100, 120))
    b = pooled_counts(d, 1.0, 2, range(200, 220))
    k = 3
    ta = np.bincount(np.minimum(a, k), minlength=k + 1)
    tb = np.bincount(np.minimum(b, k), minlength=k + 1)
    assert sps.chi2_contingency(np.stack([ta, tb]))[1] > 0.01


def test_nested_domain_restriction():
    # length-4 loops of the big box that fit in the small box have the small box's per-cell means
    big = build_domain("box", width=12, height=24)
    small = build_domain("box", width=6, height=12)
    inner_counts, small_counts = [], []
    for s in range(60):
        sb = sample_loop_soup(SoupConfig(big, 1.0, cutoff=4, n_max=4, seed=s))
        roots = np.array([lp.sites[0] for lp in sb.loops if small.contains(lp.sites[:, 0], lp.sites[:, 1]).all()])
        inner_counts.append(len(roots))
        ss = sample_loop_soup(SoupConfig(small, 1.0, cutoff=4, n_max=4, seed=1000 + s))
        small_counts.append(len(ss))
    a, b = np.array(inner_counts), np.array(small_counts)
    se = math.sqrt(a.var(ddof=1) / len(a) + b.var(ddof=1) / len(b))
    assert abs(a.mean() - b.mean()) < 3 * se


def test_soup_distance_examples():
    a = RwLoop(square_loop(0, 0, 4))
    b = RwLoop(square_loop(1, 0, 4))
    small = RwLoop(square_loop(0, 0, 1))
    d_ref = 64.0
    assert soup_distance([a, small], [a, small], 5.0, d_ref) == 0.0
    # diameter sqrt(2) of the unit square: band floor(log2(64/sqrt 2)) = 5
    assert soup_distance([small], [], 2.0, d_ref) == pytest.approx(2.0 * 2**-5)
    big_a = RwLoop(square_loop(0, 0, 30))
    big_b = RwLoop(square_loop(1, 0, 30))
    assert soup_distance([big_a], [big_b], 5.0, 40.0) == pytest.approx(1.0)
    assert soup_distance([a], [b], 0.5, d_ref) == pytest.approx(0.5 * 2.0 ** -3)


def test_soup_distance_bottleneck_matching():
    # greedy nearest matching would pair badly; the exact matching finds max distance 1
    loops1 = [RwLoop(square_loop(x, 0, 2)) for x in (0, 3)]
    loops2 = [RwLoop(square_loop(x, 0, 2)) for x in (1, 4)]
    assert soup_distance(loops1, loops2, 10.0, 4.0) == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(-10, 10), st.integers(-10, 10), st.integers(1, 6)), min_size=1, max_size=5),
       st.lists(st.tuples(st.integers(-10, 10), st.integers(-10, 10), st.integers(1, 6)), max_size=5))
def test_soup_distance_metric_properties(spec_a, spec_b):
    A = [RwLoop(square_loop(*t)) for t in spec_a]
    B = [RwLoop(square_loop(*t)) for t in spec_b]
    dab = soup_distance(A, B, 3.0, 32.0)
    assert dab == pytest.approx(soup_distance(B, A, 3.0, 32.0))
    assert dab >= 0
    assert soup_distance(A, A, 3.0, 32.0) == 0
    assert dab <= 3.0 * 2


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 40).map(lambda n: 2 * n), st.integers(0, 2**32))
def test_bridge_is_closed_walk(two_n, seed):
    loop = sample_bridge((0, 0), two_n, build_domain("disk", radius=60), stream(seed, 1))
    steps = np.diff(np.vstack([loop.sites, loop.sites[:1]]), axis=0)
    assert loop.length == two_n
    assert (np.abs(steps).sum(axis=1) == 1).all()
