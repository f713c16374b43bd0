import networkx as nx
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from loopsoup.clusters import (
    boundary_touching_loops,
    build_clusters,
    cluster_containing,
    complete_cluster,
    largest_cluster_fraction,
    outermost_clusters,
)
from loopsoup.lattice import build_domain
from loopsoup.loops import SoupConfig, sample_loop_soup

from conftest import make_sample, rect_loop, square_loop


def nx_partition(traces):
    """Oracle: connected components of the pairwise intersection graph."""
    g = nx.Graph()
    g.add_nodes_from(range(len(traces)))
    sets = [set(map(tuple, np.asarray(t).tolist())) for t in traces]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i] & sets[j]:
                g.add_edge(i, j)
    return sorted(sorted(c) for c in nx.connected_components(g))


def partition(cs):
    return sorted(sorted(m.tolist()) for m in cs.members)


def test_basic_clustering():
    assert len(build_clusters(make_sample([square_loop(0, 0, 2), square_loop(2, 2, 2)]))) == 1
    assert len(build_clusters(make_sample([square_loop(0, 0, 2), square_loop(5, 5, 2)]))) == 2
    chain = [rect_loop(0, 0, 2, 1), rect_loop(2, 0, 2, 1), rect_loop(4, 0, 2, 1)]
    cs = build_clusters(make_sample(chain))
    assert partition(cs) == [[0, 1, 2]] == nx_partition([np.array(c) for c in chain])


def test_canonical_ids():
    loops = [square_loop(8, 8, 1), square_loop(-8, -8, 1), square_loop(8, 9, 1)]
    cs = build_clusters(make_sample(loops))
    assert cs.labels.tolist() == [0, 1, 0]


def test_outermost_nested_and_side_by_side():
    ring = square_loop(-5, -5, 10)
    inner = square_loop(-1, -1, 2)
    cs = build_clusters(make_sample([inner, ring]))
    assert outermost_clusters(cs) == [1]
    cs = build_clusters(make_sample([square_loop(-8, 0, 3), square_loop(4, 0, 3)]))
    assert outermost_clusters(cs) == [0, 1]


def test_complete_cluster_membership():
    ring = square_loop(-5, -5, 10)
    inside = square_loop(-1, -1, 2)
    outside = square_loop(8, 8, 2)
    sticking_out = rect_loop(5, 0, 4, 1)  # shares (5, 0) and (5, 1) with the ring
    cs = build_clusters(make_sample([ring, inside, outside, sticking_out]))
    core = cs.labels[0]
    cc = complete_cluster(cs, core)
    assert sorted(cc.members.tolist()) == [0, 1, 3]
    assert len(complete_cluster(build_clusters(make_sample([ring])), 0)) == 1


def test_boundary_touching_examples():
    ring = square_loop(-5, -5, 10)
    cc = complete_cluster(build_clusters(make_sample([ring])), 0)
    assert boundary_touching_loops(cc).tolist() == [0]
    cs = build_clusters(make_sample([ring, square_loop(-1, -1, 2)]))
    assert boundary_touching_loops(cs.complete(0)).tolist() == [0]
    # two overlapping loops that both reach the hull
    cs = build_clusters(make_sample([rect_loop(0, 0, 6, 2), rect_loop(3, -2, 6, 2)]))
    assert sorted(boundary_touching_loops(cs.complete(0)).tolist()) == [0, 1]


def test_cluster_containing():
    ring = square_loop(-5, -5, 10)
    inner_ring = square_loop(-3, -3, 6)
    cs = build_clusters(make_sample([inner_ring, ring]))
    assert cluster_containing(cs, (0, 0)) == 1
    assert cluster_containing(cs, (12, 0)) is None
    cs = build_clusters(make_sample([square_loop(-2, -2, 4)]))
    assert cluster_containing(cs, (0, 0)) == 0


def test_largest_cluster_fraction():
    cs = build_clusters(make_sample([square_loop(0, 0, 2), square_loop(8, 8, 1)]))
    assert largest_cluster_fraction(cs) == 8 / 12
    assert largest_cluster_fraction(build_clusters(make_sample([]))) == 0.0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-12, 8), st.integers(-12, 8), st.integers(1, 4), st.integers(1, 4)),
                min_size=1, max_size=40))
def test_union_find_matches_oracle(rects):
    loops = [rect_loop(*r) for r in rects]
    cs = build_clusters(make_sample(loops))
    assert partition(cs) == nx_partition([np.array(p) for p in loops])


def test_random_soups_outermost_fillings_disjoint():
    for seed in range(5):
        s = sample_loop_soup(SoupConfig(build_domain("disk", radius=24), 1.0, seed=seed))
        cs = build_clusters(s)
        assert partition(cs) == nx_partition([lp.trace for lp in s.loops])
        seen = set()
        for cid in cs.outermost:
            f = {tuple(p) for p in cs.filling(cid).coords.tolist()}
            assert not f & seen
            seen |= f
            cc = cs.complete(cid)
            assert len(boundary_touching_loops(cc)) > 0
        # every loop belongs to exactly one complete cluster
        members = sorted(i for cid in cs.outermost for i in cs.complete(cid).members.tolist())
        assert members == list(range(len(s)))
