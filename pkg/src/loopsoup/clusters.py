"""Loop clusters, outermost clusters and complete clusters."""

from __future__ import annotations

from functools import cached_property

import numpy as np
from scipy import ndimage

from ._unionfind import UnionFind, label_traces
from .loops import LoopSoupSample, trace_diameter
from .topology import CROSS, Contour, SiteSet, outer_contour


class ClusterSet:
    """Partition of a sample's loops into clusters of site-sharing loops.

    Cluster ids are canonical: cluster 0 holds loop 0, and ids increase with
    the smallest loop index of each cluster.  Fillings, the outermost test and
    complete clusters are computed lazily and cached.
    """

    def __init__(self, sample: LoopSoupSample, labels: np.ndarray):
        self.sample = sample
        self.labels = labels
        self.grid = sample.config.domain.grid
        n = int(labels.max()) + 1 if len(labels) else 0
        order = np.argsort(labels, kind="stable")
        bounds = np.searchsorted(labels[order], np.arange(n + 1))
        self.members = [order[bounds[i] : bounds[i + 1]] for i in range(n)]
        g = self.grid
        site_label = -np.ones(g.shape, dtype=np.int64)
        for i, loop in enumerate(sample.loops):
            t = loop.trace
            site_label[t[:, 0] - g.x0, t[:, 1] - g.y0] = labels[i]
        self.site_label = site_label
        self._fill: dict[int, tuple[np.ndarray, int, int]] = {}

    def __len__(self) -> int:
        return len(self.members)

    @cached_property
    def _boxes(self) -> np.ndarray:
        g = self.grid
        idx = np.argwhere(self.site_label >= 0)
        lab = self.site_label[idx[:, 0], idx[:, 1]]
        n = len(self)
        boxes = np.empty((n, 4), dtype=np.int64)
        boxes[:, 0] = boxes[:, 1] = np.iinfo(np.int64).max
        boxes[:, 2] = boxes[:, 3] = np.iinfo(np.int64).min
        np.minimum.at(boxes[:, 0], lab, idx[:, 0])
        np.minimum.at(boxes[:, 1], lab, idx[:, 1])
        np.maximum.at(boxes[:, 2], lab, idx[:, 0])
        np.maximum.at(boxes[:, 3], lab, idx[:, 1])
        boxes[:, [0, 2]] += g.x0
        boxes[:, [1, 3]] += g.y0
        return boxes

    def bbox(self, cid: int) -> tuple[int, int, int, int]:
        return tuple(int(v) for v in self._boxes[cid])

    def _local(self, cid: int):
        """Padded raster of the cluster trace and its origin."""
        g = self.grid
        x0, y0, x1, y1 = self.bbox(cid)
        sub = self.site_label[x0 - g.x0 : x1 - g.x0 + 1, y0 - g.y0 : y1 - g.y0 + 1] == cid
        return np.pad(sub, 1), x0 - 1, y0 - 1

    def trace(self, cid: int) -> SiteSet:
        m, x0, y0 = self._local(cid)
        return SiteSet.from_mask(m, x0, y0)

    def _filled(self, cid: int):
        if cid not in self._fill:
            m, x0, y0 = self._local(cid)
            if m.shape[0] >= 5 and m.shape[1] >= 5:
                m = ndimage.binary_fill_holes(m, structure=CROSS)
            self._fill[cid] = (m, x0, y0)
        return self._fill[cid]

    def filling(self, cid: int) -> SiteSet:
        m, x0, y0 = self._filled(cid)
        return SiteSet.from_mask(m, x0, y0)

    def diameter(self, cid: int) -> float:
        return trace_diameter(self.trace(cid).coords)

    @cached_property
    def _covered(self) -> np.ndarray:
        """Grid of sites lying in a hole of some cluster."""
        g = self.grid
        cov = np.zeros(g.shape, dtype=bool)
        for cid in range(len(self)):
            x0, y0, x1, y1 = self.bbox(cid)
            if x1 - x0 < 2 or y1 - y0 < 2:
                continue
            m, mx, my = self._filled(cid)
            own = self.site_label[mx - g.x0 : mx - g.x0 + m.shape[0], my - g.y0 : my - g.y0 + m.shape[1]] == cid
            cov[mx - g.x0 : mx - g.x0 + m.shape[0], my - g.y0 : my - g.y0 + m.shape[1]] |= m & ~own
        return cov

    @cached_property
    def outermost(self) -> list[int]:
        g = self.grid
        reps = [self.sample.loops[m[0]].sites[0] for m in self.members]
        out = []
        for cid, r in enumerate(reps):
            if not self._covered[r[0] - g.x0, r[1] - g.y0]:
                out.append(cid)
        return out

    @cached_property
    def _owner(self) -> np.ndarray:
        """Grid mapping each site to the outermost cluster whose filling holds it."""
        g = self.grid
        own = -np.ones(g.shape, dtype=np.int64)
        for cid in self.outermost:
            m, mx, my = self._filled(cid)
            view = own[mx - g.x0 : mx - g.x0 + m.shape[0], my - g.y0 : my - g.y0 + m.shape[1]]
            view[m] = cid
        return own

    def owner_of(self, site) -> int | None:
        g = self.grid
        i, j = int(site[0]) - g.x0, int(site[1]) - g.y0
        if not (0 <= i < g.nx and 0 <= j < g.ny):
            return None
        v = int(self._owner[i, j])
        return None if v < 0 else v

    def loops_of(self, cid: int) -> list:
        return [self.sample.loops[i] for i in self.members[cid]]

    def complete(self, cid: int) -> "CompleteCluster":
        return complete_cluster(self, cid)


class CompleteCluster:
    """An outermost cluster together with every loop whose trace lies in its filling."""

    def __init__(self, clusters: ClusterSet, core: int, members: np.ndarray):
        self.clusters = clusters
        self.core = core
        self.members = members  # loop indices into the sample

    @property
    def loops(self) -> list:
        return [self.clusters.sample.loops[i] for i in self.members]

    @cached_property
    def filling(self) -> SiteSet:
        return self.clusters.filling(self.core)

    @cached_property
    def core_trace(self) -> SiteSet:
        return self.clusters.trace(self.core)

    @cached_property
    def trace(self) -> SiteSet:
        """Union of member traces."""
        pts = np.concatenate([self.clusters.sample.loops[i].trace for i in self.members])
        return SiteSet(pts)

    @cached_property
    def contour(self) -> Contour:
        return outer_contour(self.filling)

    @property
    def diameter(self) -> float:
        return self.clusters.diameter(self.core)

    def __len__(self) -> int:
        return len(self.members)


def boundary_touching_loops(cc: CompleteCluster) -> np.ndarray:
    """Sample indices of member loops with a trace site on the outer contour.

    A filled site is incident to the outer contour iff one of its four
    neighbours lies outside the filling (the filling has no holes).
    """
    m, x0, y0 = cc.clusters._filled(cc.core)
    P = np.pad(m, 1)
    edge = m & ~(P[2:, 1:-1] & P[:-2, 1:-1] & P[1:-1, 2:] & P[1:-1, :-2])
    out = []
    loops = cc.clusters.sample.loops
    for i in cc.members.tolist():
        t = loops[i].trace
        if edge[t[:, 0] - x0, t[:, 1] - y0].any():
            out.append(i)
    return np.array(out, dtype=np.int64)


def build_clusters(sample: LoopSoupSample) -> ClusterSet:
    labels = label_traces([loop.trace for loop in sample.loops])
    return ClusterSet(sample, labels)


def outermost_clusters(clusters: ClusterSet) -> list[int]:
    return list(clusters.outermost)


def complete_cluster(clusters: ClusterSet, cid: int) -> CompleteCluster:
    """Attach to an outermost cluster every loop whose trace lies inside its filling."""
    if cid not in set(clusters.outermost):
        raise ValueError(f"cluster {cid} is not outermost")
    m, x0, y0 = clusters._filled(cid)
    core = set(clusters.members[cid].tolist())
    g = clusters.grid
    loops = clusters.sample.loops
    roots = np.array([lp.sites[0] for lp in loops], dtype=np.int64).reshape(-1, 2)
    # a loop inside the filling has its root there too
    cand = np.flatnonzero(clusters._owner[roots[:, 0] - g.x0, roots[:, 1] - g.y0] == cid)
    out = []
    for i in cand.tolist():
        if i in core:
            out.append(i)
            continue
        t = loops[i].trace
        ii = t[:, 0] - x0
        jj = t[:, 1] - y0
        if ii.min() < 0 or jj.min() < 0 or ii.max() >= m.shape[0] or jj.max() >= m.shape[1]:
            continue
        if m[ii, jj].all():
            out.append(i)
    return CompleteCluster(clusters, cid, np.array(out, dtype=np.int64))


def cluster_containing(clusters: ClusterSet, point) -> int | None:
    """The outermost cluster whose filling contains ``point``."""
    return clusters.owner_of(point)


def largest_cluster_fraction(clusters: ClusterSet) -> float:
    """Share of occupied sites that lie on the largest cluster's trace."""
    lab = clusters.site_label[clusters.site_label >= 0]
    if len(lab) == 0:
        return 0.0
    return float(np.bincount(lab).max() / len(lab))


def brute_force_clusters(traces) -> np.ndarray:
    """Reference labels: BFS over the pairwise trace-intersection graph."""
    sets = [set(map(tuple, np.asarray(t).tolist())) for t in traces]
    n = len(sets)
    labels = -np.ones(n, dtype=np.int64)
    nxt = 0
    for s in range(n):
        if labels[s] >= 0:
            continue
        labels[s] = nxt
        queue = [s]
        while queue:
            a = queue.pop()
            for b in range(n):
                if labels[b] < 0 and sets[a] & sets[b]:
                    labels[b] = nxt
                    queue.append(b)
        nxt += 1
    return labels


__all__ = [
    "ClusterSet",
    "CompleteCluster",
    "UnionFind",
    "boundary_touching_loops",
    "brute_force_clusters",
    "build_clusters",
    "cluster_containing",
    "complete_cluster",
    "largest_cluster_fraction",
    "outermost_clusters",
]
