from __future__ import annotations

import numpy as np


class UnionFind:
    """Union-find with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def labels(self) -> np.ndarray:
        """Canonical labels: components numbered by their smallest member."""
        roots = [self.find(i) for i in range(len(self.parent))]
        out = np.empty(len(roots), dtype=np.int64)
        seen: dict[int, int] = {}
        for i, r in enumerate(roots):
            out[i] = seen.setdefault(r, len(seen))
        return out


def trace_keys(traces, ny: int, x0: int, y0: int):
    """Concatenated site keys of all traces with the owning trace index."""
    if not traces:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    lens = np.fromiter((len(t) for t in traces), dtype=np.int64, count=len(traces))
    allsites = np.concatenate(traces)
    keys = (allsites[:, 0] - x0) * ny + (allsites[:, 1] - y0)
    owner = np.repeat(np.arange(len(traces)), lens)
    return keys, owner


def label_traces(traces) -> np.ndarray:
    """Cluster labels for site sets joined whenever two of them share a site.

    Sites are bucketed by key; every trace in a bucket is unioned with the
    first one there.
    """
    uf = UnionFind(len(traces))
    if len(traces) > 1:
        allsites = np.concatenate(traces)
        x0, y0 = allsites.min(axis=0)
        ny = int(allsites[:, 1].max() - y0 + 1)
        keys, owner = trace_keys(traces, ny, int(x0), int(y0))
        order = np.argsort(keys, kind="stable")
        k = keys[order]
        o = owner[order]
        same = np.flatnonzero(k[1:] == k[:-1])
        # first owner in each bucket
        start = np.r_[0, np.flatnonzero(k[1:] != k[:-1]) + 1]
        head = np.repeat(o[start], np.diff(np.r_[start, len(k)]))
        for a, b in zip(head[same + 1].tolist(), o[same + 1].tolist()):
            if a != b:
                uf.union(a, b)
    return uf.labels()
