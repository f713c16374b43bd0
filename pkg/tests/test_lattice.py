import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import ndimage

from loopsoup.lattice import (
    InvalidSize,
    SiteOutsideDomain,
    build_domain,
    domain_to_str,
    half_disk_sites,
    neighbors,
    parse_domain,
)


def brute_count_disk(r):
    return sum(1 for x in range(-r, r + 1) for y in range(-r, r + 1) if x * x + y * y <= r * r)


def test_disk_site_count():
    assert len(build_domain("disk", radius=8)) == 197
    assert len(build_domain("disk", radius=13)) == brute_count_disk(13)


def test_box_site_count():
    assert len(build_domain("box", width=2, height=1)) == 10


@pytest.mark.parametrize("kw", [dict(kind="disk", radius=1), dict(kind="disk", radius=7), dict(kind="box", width=0, height=3),
                                dict(kind="box", width=3, height=-1), dict(kind="hexagon", radius=9)])
def test_invalid_sizes(kw):
    kind = kw.pop("kind")
    with pytest.raises(InvalidSize):
        build_domain(kind, **kw)


def test_neighbor_order_and_counts():
    d = build_domain("box", width=3, height=3)
    assert neighbors((0, 1), d) == [(1, 1), (0, 2), (-1, 1), (0, 0)]
    assert len(neighbors((3, 0), d)) == 2
    assert len(neighbors((-3, 3), d)) == 2


def test_disk_rim_neighbors():
    d = build_domain("disk", radius=8)
    assert neighbors((8, 0), d) == [(7, 0)]


def test_neighbors_outside():
    with pytest.raises(SiteOutsideDomain):
        neighbors((9, 0), build_domain("disk", radius=8))


def test_half_disk_examples():
    d = build_domain("box", width=10, height=10)
    assert sorted(map(tuple, half_disk_sites(d, 0, 1).tolist())) == [(0, 0)]
    got = sorted(map(tuple, half_disk_sites(d, 0, 2).tolist()))
    assert got == [(-1, 0), (-1, 1), (0, 0), (0, 1), (1, 0), (1, 1)]
    assert len(half_disk_sites(d, 0, 100)) == len(d)


def test_boundary_definition():
    d = build_domain("box", width=2, height=1)
    # every site of a 5 x 2 box touches the outside
    assert len(d.boundary_sites()) == 10
    d = build_domain("disk", radius=8)
    b = {tuple(s) for s in d.boundary_sites().tolist()}
    for x, y in d.sites.tolist():
        assert ((x, y) in b) == (len(neighbors((x, y), d)) < 4)


@pytest.mark.parametrize("text", ["disk:8", "disk:40", "box:3,7"])
def test_parse_round_trip(text):
    assert domain_to_str(parse_domain(text)) == text


@pytest.mark.parametrize("text", ["disk:", "disk:x", "box:3", "ring:5", "disk:4"])
def test_parse_rejects(text):
    with pytest.raises(InvalidSize):
        parse_domain(text)


domains = st.one_of(
    st.integers(8, 20).map(lambda r: build_domain("disk", radius=r)),
    st.tuples(st.integers(1, 12), st.integers(1, 12)).map(lambda t: build_domain("box", width=t[0], height=t[1])),
)


@settings(max_examples=30, deadline=None)
@given(domains)
def test_domain_connected(d):
    _, n = ndimage.label(d.mask)
    assert n == 1


@settings(max_examples=30, deadline=None)
@given(domains, st.data())
def test_neighbors_symmetric(d, data):
    i = data.draw(st.integers(0, len(d) - 1))
    s = tuple(d.sites[i])
    for t in neighbors(s, d):
        assert s in neighbors(t, d)


@settings(max_examples=40, deadline=None)
@given(st.integers(-5, 5), st.floats(1, 6), st.floats(1, 6))
def test_half_disk_nested(a, e1, e2):
    d = build_domain("box", width=8, height=8)
    lo, hi = sorted((e1, e2))
    small = {tuple(s) for s in half_disk_sites(d, a, lo).tolist()}
    big = {tuple(s) for s in half_disk_sites(d, a, hi).tolist()}
    assert small and small <= big
    assert all((x - a) ** 2 + y * y < hi * hi for x, y in big)
