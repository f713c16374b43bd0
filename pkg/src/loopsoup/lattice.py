"""Square-lattice domains: a closed disk and a half-plane box."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np


class InvalidSize(ValueError):
    pass


class SiteOutsideDomain(ValueError):
    pass


class Site(NamedTuple):
    x: int
    y: int


# E, N, W, S
STEPS = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=np.int64)

MIN_RADIUS = 8


@dataclass(frozen=True)
class LatticeDomain:
    """A finite 4-connected set of lattice sites.

    ``kind`` is ``"disk"`` (sites with x²+y² ≤ R²) or ``"box"`` (the
    half-plane box 0 ≤ y ≤ H, |x| ≤ W).
    """

    kind: str
    radius: int = 0
    width: int = 0
    height: int = 0

    def contains(self, x, y):
        """Vectorized membership test."""
        x = np.asarray(x)
        y = np.asarray(y)
        if self.kind == "disk":
            return x * x + y * y <= self.radius * self.radius
        return (np.abs(x) <= self.width) & (y >= 0) & (y <= self.height)

    def __contains__(self, site) -> bool:
        return bool(self.contains(site[0], site[1]))

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        """(xmin, ymin, xmax, ymax) of the site set."""
        if self.kind == "disk":
            r = self.radius
            return (-r, -r, r, r)
        return (-self.width, 0, self.width, self.height)

    @property
    def diameter(self) -> float:
        if self.kind == "disk":
            return 2.0 * self.radius
        return float(np.hypot(2 * self.width, self.height))

    @property
    def scale(self) -> int:
        """Linear size used for default length caps."""
        if self.kind == "disk":
            return self.radius
        return max(self.width, self.height)

    @cached_property
    def sites(self) -> np.ndarray:
        """All sites as an (N, 2) array in lexicographic (x, y) order."""
        xmin, ymin, xmax, ymax = self.bbox
        xs, ys = np.meshgrid(np.arange(xmin, xmax + 1), np.arange(ymin, ymax + 1), indexing="ij")
        xs = xs.ravel()
        ys = ys.ravel()
        keep = self.contains(xs, ys)
        return np.stack([xs[keep], ys[keep]], axis=1).astype(np.int64)

    def __len__(self) -> int:
        return len(self.sites)

    @cached_property
    def grid(self) -> "Grid":
        """Padded raster covering the domain with a one-site margin."""
        xmin, ymin, xmax, ymax = self.bbox
        return Grid(xmin - 1, ymin - 1, xmax - xmin + 3, ymax - ymin + 3)

    @cached_property
    def mask(self) -> np.ndarray:
        g = self.grid
        m = np.zeros(g.shape, dtype=bool)
        m[g.index(self.sites)] = True
        return m

    def boundary_sites(self) -> np.ndarray:
        """Sites with fewer than four in-domain neighbors."""
        s = self.sites
        inside = np.ones(len(s), dtype=bool)
        for step in STEPS:
            inside &= self.contains(s[:, 0] + step[0], s[:, 1] + step[1])
        return s[~inside]


@dataclass(frozen=True)
class Grid:
    """Integer raster with origin (x0, y0); array axis 0 is x, axis 1 is y."""

    x0: int
    y0: int
    nx: int
    ny: int

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    def index(self, coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        coords = np.asarray(coords)
        return coords[..., 0] - self.x0, coords[..., 1] - self.y0

    def key(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        return (coords[..., 0] - self.x0) * self.ny + (coords[..., 1] - self.y0)

    def unkey(self, keys: np.ndarray) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.int64)
        return np.stack([keys // self.ny + self.x0, keys % self.ny + self.y0], axis=-1)


def build_domain(kind: str, *, radius: int = 0, width: int = 0, height: int = 0) -> LatticeDomain:
    if kind == "disk":
        if radius < MIN_RADIUS:
            raise InvalidSize(f"disk radius must be >= {MIN_RADIUS}, got {radius}")
        return LatticeDomain("disk", radius=int(radius))
    if kind == "box":
        if width <= 0 or height <= 0:
            raise InvalidSize(f"box sizes must be positive, got W={width}, H={height}")
        return LatticeDomain("box", width=int(width), height=int(height))
    raise InvalidSize(f"unknown domain kind {kind!r}")


def neighbors(site, domain: LatticeDomain) -> list[Site]:
    """In-domain nearest neighbors of ``site`` in E, N, W, S order."""
    if site not in domain:
        raise SiteOutsideDomain(f"{tuple(site)} is not in the domain")
    x, y = int(site[0]), int(site[1])
    out = []
    for dx, dy in STEPS:
        t = Site(x + int(dx), y + int(dy))
        if t in domain:
            out.append(t)
    return out


def half_disk_sites(domain: LatticeDomain, a, eps: float) -> np.ndarray:
    """Domain sites at Euclidean distance strictly less than ``eps`` from ``a``.

    ``a`` is a boundary site, or an integer x-coordinate on the bottom row of a box.
    """
    if np.ndim(a) == 0:
        a = (int(a), 0)
    ax, ay = int(a[0]), int(a[1])
    r = int(np.ceil(eps))
    xs, ys = np.meshgrid(np.arange(ax - r, ax + r + 1), np.arange(ay - r, ay + r + 1), indexing="ij")
    xs = xs.ravel()
    ys = ys.ravel()
    keep = ((xs - ax) ** 2 + (ys - ay) ** 2 < eps * eps) & domain.contains(xs, ys)
    return np.stack([xs[keep], ys[keep]], axis=1).astype(np.int64)


def parse_domain(text: str) -> LatticeDomain:
    """Parse ``disk:R`` or ``box:W,H``."""
    try:
        kind, _, rest = text.partition(":")
        if kind == "disk":
            return build_domain("disk", radius=int(rest))
        if kind == "box":
            w, h = rest.split(",")
            return build_domain("box", width=int(w), height=int(h))
    except ValueError as exc:
        if isinstance(exc, InvalidSize):
            raise
        raise InvalidSize(f"cannot parse domain {text!r}") from exc
    raise InvalidSize(f"cannot parse domain {text!r}")


def domain_to_str(domain: LatticeDomain) -> str:
    if domain.kind == "disk":
        return f"disk:{domain.radius}"
    return f"box:{domain.width},{domain.height}"
