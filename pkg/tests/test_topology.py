import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopsoup.topology import (
    EmptySubset,
    NotConnected,
    NotFilled,
    SiteSet,
    articulation_sites,
    encircles,
    filling,
    is_connected,
    outer_contour,
    separating_sites,
    subset_connected,
)

RING = [(x, y) for x in range(3) for y in range(3) if (x, y) != (1, 1)]
BLOCK3 = [(x, y) for x in range(3) for y in range(3)]


def as_set(s):
    return {tuple(p) for p in s.coords.tolist()}


def site_graph(sites):
    g = nx.Graph()
    g.add_nodes_from(sites)
    for x, y in sites:
        for t in ((x + 1, y), (x, y + 1)):
            if t in g:
                g.add_edge((x, y), t)
    return g


def cut_oracle(sites):
    """Remove each site and count components by BFS."""
    sites = list(sites)
    base = nx.number_connected_components(site_graph(sites))
    out = set()
    for s in sites:
        rest = [t for t in sites if t != s]
        if rest and nx.number_connected_components(site_graph(rest)) > base:
            out.add(s)
    return out


def test_filling_examples():
    assert as_set(filling(RING)) == set(BLOCK3)
    assert as_set(filling([(4, 4)])) == {(4, 4)}
    assert as_set(filling([(0, 0), (5, 5)])) == {(0, 0), (5, 5)}


def test_filling_checks_box():
    with pytest.raises(ValueError):
        filling(RING, box=(0, 0, 5, 5))
    assert as_set(filling(RING, box=(-1, -1, 3, 3))) == set(BLOCK3)


def test_filling_diagonal_gap_not_closed():
    # a diamond of diagonal neighbours does not enclose its centre under 4-connectivity of the complement...
    diamond = [(1, 0), (0, 1), (2, 1), (1, 2)]
    # ...the centre is 4-adjacent only to diamond sites, so it is a hole and gets filled
    assert (1, 1) in filling(diamond)
    # a bigger diagonal ring leaks through its corners
    ring = [(2, 0), (1, 1), (0, 2), (1, 3), (2, 4), (3, 3), (4, 2), (3, 1)]
    assert (2, 1) in filling(ring)


def test_contour_sizes():
    assert len(outer_contour([(0, 0)])) == 4
    assert len(outer_contour([(0, 0), (1, 0)])) == 6
    c = outer_contour(BLOCK3)
    assert len(c) == 12
    poly = c.polyline()
    assert (poly[0] == poly[-1]).all()
    assert c.area() == pytest.approx(9.0)


def test_contour_starts_lexicographically_and_turns_counterclockwise():
    c = outer_contour(BLOCK3)
    assert tuple(c.corners[0]) == (0, 0)
    assert tuple(c.corners[1]) == (1, 0)  # heading east along the bottom
    assert c.area() > 0


def test_contour_errors():
    with pytest.raises(NotFilled):
        outer_contour(RING)
    with pytest.raises(NotConnected):
        outer_contour([(0, 0), (3, 0)])
    with pytest.raises(NotConnected):
        outer_contour([])


def test_subset_connected_examples():
    a = np.array([(0, 0), (1, 0)])
    b = np.array([(1, 0), (2, 0)])
    c = np.array([(2, 0), (3, 0)])
    far = np.array([(9, 9)])
    assert subset_connected([a])
    assert not subset_connected([a, far])
    assert subset_connected([a, b, c])
    assert not subset_connected([a, c])
    with pytest.raises(EmptySubset):
        subset_connected([])


def test_articulation_examples():
    assert as_set(articulation_sites([(0, 0), (1, 0), (2, 0)])) == {(1, 0)}
    assert not articulation_sites([(0, 0), (1, 0), (0, 1), (1, 1)])
    # two 2 x 2 blocks sharing the site (1, 1)
    blocks = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (2, 2)]
    assert as_set(articulation_sites(blocks)) == {(1, 1)}


def test_articulation_restricted_to_contour():
    # the centre of a plus is a cut site with all four neighbours filled, so it is off the contour
    plus = [(1, 1), (0, 1), (2, 1), (1, 0), (1, 2)]
    c = outer_contour(plus)
    assert as_set(articulation_sites(plus)) == {(1, 1)}
    assert not articulation_sites(plus, c)
    big = [(x, y) for x in range(5) for y in range(5) if x == 2 or y == 2]
    c = outer_contour(big)
    assert as_set(articulation_sites(big, c)) == as_set(articulation_sites(big)) - {(2, 2)}


def test_encircles_examples():
    assert encircles(RING, (1, 1))
    assert encircles(RING, (0, 0))
    assert not encircles(RING, (10, 10))


def test_separating_sites_ring():
    # the whole ring is needed except the corners, which touch the hole only diagonally
    got = as_set(separating_sites(RING, (1, 1)))
    assert got == {(1, 0), (0, 1), (2, 1), (1, 2)}
    assert not separating_sites(RING, (5, 5))
    thick = [(x, y) for x in range(5) for y in range(5) if (x, y) != (2, 2)]
    assert not separating_sites(thick, (2, 2))


random_sets = st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), min_size=1, max_size=60, unique=True)


@settings(max_examples=60, deadline=None)
@given(random_sets)
def test_filling_idempotent_and_area(pts):
    f = filling(pts)
    assert filling(f) == f
    assert set(pts) <= as_set(f)
    for comp in nx.connected_components(site_graph(sorted(as_set(f)))):
        comp_fill = filling(sorted(comp))
        c = outer_contour(comp_fill)
        assert c.area() == pytest.approx(len(comp_fill))


@settings(max_examples=80, deadline=None)
@given(random_sets)
def test_articulation_matches_oracle(pts):
    assert as_set(articulation_sites(pts)) == cut_oracle(pts)


@settings(max_examples=40, deadline=None)
@given(random_sets)
def test_is_connected_matches_networkx(pts):
    assert is_connected(pts) == nx.is_connected(site_graph(pts))


def test_siteset_algebra():
    a = SiteSet([(0, 0), (1, 0)])
    b = SiteSet([(1, 0), (2, 0)])
    assert as_set(a | b) == {(0, 0), (1, 0), (2, 0)}
    assert as_set(a & b) == {(1, 0)}
    assert as_set(a - b) == {(0, 0)}
    assert (a & b).issubset(a)
    assert SiteSet([(1, 0), (0, 0), (1, 0)]) == a
