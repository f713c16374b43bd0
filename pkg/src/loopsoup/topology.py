"""Planar topology of lattice site sets.

Fillings flood the complement with 4-connectivity; contours live on the dual
lattice, where the site (x, y) is the unit square centred at (x, y) and dual
corner (i, j) sits at (i - 1/2, j - 1/2).
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
from scipy import ndimage

from ._unionfind import label_traces

CROSS = ndimage.generate_binary_structure(2, 1)


class NotFilled(ValueError):
    pass


class NotConnected(ValueError):
    pass


class EmptySubset(ValueError):
    pass


class SiteSet:
    """Finite set of lattice sites backed by a boolean raster over its bounding box."""

    def __init__(self, coords=()):
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
        if len(coords) == 0:
            self.x0 = self.y0 = 0
            self.mask = np.zeros((0, 0), dtype=bool)
            return
        lo = coords.min(axis=0)
        hi = coords.max(axis=0)
        self.x0, self.y0 = int(lo[0]), int(lo[1])
        self.mask = np.zeros((int(hi[0] - lo[0]) + 1, int(hi[1] - lo[1]) + 1), dtype=bool)
        self.mask[coords[:, 0] - self.x0, coords[:, 1] - self.y0] = True

    @classmethod
    def from_mask(cls, mask: np.ndarray, x0: int, y0: int) -> "SiteSet":
        out = cls.__new__(cls)
        idx = np.argwhere(mask)
        if len(idx) == 0:
            out.x0 = out.y0 = 0
            out.mask = np.zeros((0, 0), dtype=bool)
            return out
        lo = idx.min(axis=0)
        hi = idx.max(axis=0)
        out.mask = np.ascontiguousarray(mask[lo[0] : hi[0] + 1, lo[1] : hi[1] + 1], dtype=bool)
        out.x0 = int(x0 + lo[0])
        out.y0 = int(y0 + lo[1])
        return out

    @cached_property
    def coords(self) -> np.ndarray:
        """Sites as an (N, 2) array in lexicographic order."""
        return (np.argwhere(self.mask) + (self.x0, self.y0)).astype(np.int64)

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __bool__(self) -> bool:
        return bool(self.mask.any())

    def __iter__(self):
        return (tuple(map(int, c)) for c in self.coords)

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        """(xmin, ymin, xmax, ymax); undefined for the empty set."""
        return (self.x0, self.y0, self.x0 + self.mask.shape[0] - 1, self.y0 + self.mask.shape[1] - 1)

    def contains(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
        i = coords[:, 0] - self.x0
        j = coords[:, 1] - self.y0
        ok = (i >= 0) & (j >= 0) & (i < self.mask.shape[0]) & (j < self.mask.shape[1])
        out = np.zeros(len(coords), dtype=bool)
        out[ok] = self.mask[i[ok], j[ok]]
        return out

    def __contains__(self, site) -> bool:
        return bool(self.contains([site])[0])

    def window(self, x0: int, y0: int, nx: int, ny: int) -> np.ndarray:
        """This set rasterised on the window with origin (x0, y0) and shape (nx, ny)."""
        out = np.zeros((nx, ny), dtype=bool)
        if not self:
            return out
        sx, sy = self.x0 - x0, self.y0 - y0
        mx, my = self.mask.shape
        ax, ay = max(sx, 0), max(sy, 0)
        bx, by = min(sx + mx, nx), min(sy + my, ny)
        if ax < bx and ay < by:
            out[ax:bx, ay:by] = self.mask[ax - sx : bx - sx, ay - sy : by - sy]
        return out

    def _binary(self, other: "SiteSet", op) -> "SiteSet":
        if not self and not other:
            return SiteSet()
        boxes = [s.bbox for s in (self, other) if s]
        x0 = min(b[0] for b in boxes)
        y0 = min(b[1] for b in boxes)
        nx = max(b[2] for b in boxes) - x0 + 1
        ny = max(b[3] for b in boxes) - y0 + 1
        return SiteSet.from_mask(op(self.window(x0, y0, nx, ny), other.window(x0, y0, nx, ny)), x0, y0)

    def __or__(self, other):
        return self._binary(other, np.logical_or)

    def __and__(self, other):
        return self._binary(other, np.logical_and)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a & ~b)

    def issubset(self, other: "SiteSet") -> bool:
        return not (self - other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SiteSet):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    def __repr__(self) -> str:
        return f"SiteSet(n={len(self)})"

    def padded(self, pad: int = 1) -> tuple[np.ndarray, int, int]:
        return np.pad(self.mask, pad), self.x0 - pad, self.y0 - pad


def as_siteset(sites) -> SiteSet:
    return sites if isinstance(sites, SiteSet) else SiteSet(sites)


# ---------------------------------------------------------------------------


def filling(sites, box=None) -> SiteSet:
    """Complement of the unbounded 4-connected component of the complement."""
    s = as_siteset(sites)
    if not s:
        return SiteSet()
    if box is not None:
        xmin, ymin, xmax, ymax = s.bbox
        if not (box[0] < xmin and box[1] < ymin and box[2] > xmax and box[3] > ymax):
            raise ValueError("ambient box must strictly contain the site set")
    padded, x0, y0 = s.padded()
    filled = ndimage.binary_fill_holes(padded, structure=CROSS)
    return SiteSet.from_mask(filled, x0, y0)


def encircles(sites, point) -> bool:
    return tuple(point) in filling(sites)


def is_connected(sites) -> bool:
    s = as_siteset(sites)
    if not s:
        return False
    _, n = ndimage.label(s.mask, structure=CROSS)
    return n == 1


class Contour:
    """Counterclockwise cycle of dual edges around a filled site set.

    ``corners[k]`` is the start corner of edge k and ``inside[k]`` the filled
    site on its left.
    """

    def __init__(self, corners: np.ndarray, inside: np.ndarray):
        self.corners = corners
        self.inside = inside

    def __len__(self) -> int:
        return len(self.corners)

    def polyline(self) -> np.ndarray:
        """Closed vertex list in site coordinates; the last vertex repeats the first."""
        pts = self.corners.astype(float) - 0.5
        return np.vstack([pts, pts[:1]])

    def area(self) -> float:
        x = self.corners[:, 0].astype(float)
        y = self.corners[:, 1].astype(float)
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    @cached_property
    def incident_sites(self) -> SiteSet:
        return SiteSet(self.inside)

    def rotated_to(self, k: int) -> "Contour":
        return Contour(np.roll(self.corners, -k, axis=0), np.roll(self.inside, -k, axis=0))


def outer_contour(filled) -> Contour:
    s = as_siteset(filled)
    if not s:
        raise NotConnected("empty site set")
    if not is_connected(s):
        raise NotConnected("site set is not 4-connected")
    if filling(s) != s:
        raise NotFilled("site set differs from its filling")
    P, px, py = s.padded()
    inner = P[1:-1, 1:-1]
    ix, iy = np.nonzero(inner)
    x = ix + s.x0
    y = iy + s.y0
    pi, pj = ix + 1, iy + 1
    edges = []  # (start corner x, y, end corner x, y, site x, y)
    for empty, sx, sy, ex, ey in (
        (~P[pi, pj - 1], 0, 0, 1, 0),  # bottom, heading east
        (~P[pi + 1, pj], 1, 0, 1, 1),  # right, heading north
        (~P[pi, pj + 1], 1, 1, 0, 1),  # top, heading west
        (~P[pi - 1, pj], 0, 1, 0, 0),  # left, heading south
    ):
        xs, ys = x[empty], y[empty]
        edges.append(np.stack([xs + sx, ys + sy, xs + ex, ys + ey, xs, ys], axis=1))
    E = np.concatenate(edges)
    order = np.lexsort((E[:, 3], E[:, 2], E[:, 1], E[:, 0]))
    E = E[order]
    nxt = {(int(e[0]), int(e[1])): k for k, e in enumerate(E)}
    if len(nxt) != len(E):
        raise NotFilled("contour is not simple")
    seq = [0]
    k = 0
    for _ in range(len(E)):
        k = nxt[(int(E[k, 2]), int(E[k, 3]))]
        if k == 0:
            break
        seq.append(k)
    if len(seq) != len(E):
        raise NotConnected("boundary has more than one cycle")
    E = E[seq]
    return Contour(E[:, :2].copy(), E[:, 4:].copy())


def subset_connected(traces) -> bool:
    """True iff the given traces form a single cluster under site sharing."""
    # ndarray has a .trace method, so test the type rather than the attribute
    traces = [np.asarray(t if isinstance(t, np.ndarray) else getattr(t, "trace", t)) for t in traces]
    if not traces:
        raise EmptySubset("empty loop subset")
    labels = label_traces(traces)
    return bool(labels.max() == 0)


def articulation_sites(sites, contour: Contour | None = None) -> SiteSet:
    """Cut vertices of the 4-adjacency graph on ``sites`` (iterative Hopcroft-Tarjan).

    With a contour, only cut vertices incident to it are returned.
    """
    s = as_siteset(sites)
    coords = s.coords
    n = len(coords)
    if n < 3:
        return SiteSet()
    index = -np.ones(s.mask.shape, dtype=np.int64)
    index[coords[:, 0] - s.x0, coords[:, 1] - s.y0] = np.arange(n)
    P = np.pad(index, 1, constant_values=-1)
    ci, cj = coords[:, 0] - s.x0 + 1, coords[:, 1] - s.y0 + 1
    nbrs = np.stack([P[ci + 1, cj], P[ci, cj + 1], P[ci - 1, cj], P[ci, cj - 1]], axis=1).tolist()

    disc = [-1] * n
    low = [0] * n
    cut = [False] * n
    t = 0
    for r in range(n):
        if disc[r] >= 0:
            continue
        disc[r] = low[r] = t
        t += 1
        root_children = 0
        stack = [(r, -1, 0)]
        while stack:
            v, parent, i = stack[-1]
            if i < 4:
                stack[-1] = (v, parent, i + 1)
                w = nbrs[v][i]
                if w < 0 or w == parent:
                    continue
                if disc[w] < 0:
                    disc[w] = low[w] = t
                    t += 1
                    stack.append((w, v, 0))
                    if v == r:
                        root_children += 1
                elif disc[w] < low[v]:
                    low[v] = disc[w]
            else:
                stack.pop()
                if parent >= 0:
                    if low[v] < low[parent]:
                        low[parent] = low[v]
                    if parent != r and low[v] >= disc[parent]:
                        cut[parent] = True
        if root_children > 1:
            cut[r] = True
    out = SiteSet(coords[np.array(cut, dtype=bool)])
    if contour is not None:
        out = out & contour.incident_sites
    return out


def separating_sites(sites, point, walls=None) -> SiteSet:
    """Sites whose removal joins the complement component of ``point`` to the exterior.

    These are the cut points of ``sites`` with respect to ``point``: a site
    qualifies iff it is 4-adjacent both to the component of ``point`` and to
    the unbounded component.  ``walls`` are extra sites that block the
    complement without being candidates (e.g. the domain edge below an arc).
    """
    s = as_siteset(sites)
    block = s if walls is None else s | as_siteset(walls)
    px, py = int(point[0]), int(point[1])
    if (px, py) in block:
        return SiteSet()
    xmin, ymin, xmax, ymax = block.bbox
    if not (xmin < px < xmax and ymin < py < ymax):
        return SiteSet()
    B, x0, y0 = block.padded()
    labels, _ = ndimage.label(~B, structure=CROSS)
    ext = labels[0, 0]
    lp = labels[px - x0, py - y0]
    if lp == ext:
        return SiteSet()
    L = np.pad(labels, 1)
    coords = s.coords
    i = coords[:, 0] - x0 + 1
    j = coords[:, 1] - y0 + 1
    around = np.stack([L[i + 1, j], L[i - 1, j], L[i, j + 1], L[i, j - 1]], axis=1)
    hit = (around == lp).any(axis=1) & (around == ext).any(axis=1)
    return SiteSet(coords[hit])
