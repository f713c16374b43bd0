"""Random-walk loop measure and Poisson loop-soup sampling.

The rooted loop measure gives each closed nearest-neighbour walk of length
2n the mass 4^{-2n}/(2n); summing over the C(2n,n)^2 closed walks at a root
gives p_{2n}/(2n) per site and length, with p_{2n} the return probability of
the planar simple random walk.  A soup of intensity c is sampled rooted:
per length the total count over the domain is Poisson(N c p_{2n}/(2n)),
roots are uniform over the N sites (so per-site counts are independent
Poissons), and bridges leaving the domain are thinned out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial.distance import directed_hausdorff
from scipy.special import gammaln

from . import _rng
from .lattice import STEPS, LatticeDomain


class BudgetExceeded(RuntimeError):
    pass


class InvalidConfig(ValueError):
    pass


# ---------------------------------------------------------------------------
# return probabilities


def return_probability(two_n: int) -> Fraction:
    """Exact p_{2n} = C(2n,n)^2 / 4^{2n}."""
    if two_n <= 0 or two_n % 2:
        raise ValueError(f"length must be even and positive, got {two_n}")
    n = two_n // 2
    return Fraction(math.comb(two_n, n) ** 2, 4**two_n)


def return_probabilities(lengths: np.ndarray) -> np.ndarray:
    """Float p_{2n} for an array of even lengths (log-gamma, no overflow)."""
    lengths = np.asarray(lengths, dtype=np.int64)
    n = lengths // 2
    logc = gammaln(lengths + 1) - 2 * gammaln(n + 1)
    return np.exp(2 * logc - lengths * math.log(4))


def rooted_mass(lengths: np.ndarray, c: float = 1.0) -> np.ndarray:
    """Per-site mean number of rooted loops of each length at intensity c."""
    lengths = np.asarray(lengths, dtype=np.int64)
    return c * return_probabilities(lengths) / lengths


def tail_mass(n_max: int, c: float = 1.0) -> float:
    """c * sum_{2n > n_max} p_{2n}/(2n), per site."""
    # p_{2n}/(2n) = 1/(2 pi n^2) (1 - 1/(4n) + O(n^-2)); sum explicitly, then close with the asymptotic tail
    start = n_max + 2 - (n_max % 2)
    stop = max(start, 200_000)
    lengths = np.arange(start, stop + 1, 2)
    s = float(rooted_mass(lengths).sum()) if len(lengths) else 0.0
    m = stop // 2
    s += 1 / (2 * math.pi * m) - 5 / (16 * math.pi * m * m)
    return c * s


# ---------------------------------------------------------------------------
# loops


class RwLoop:
    """A closed nearest-neighbour lattice walk; ``sites[0]`` is the root."""

    def __init__(self, sites, check: bool = True):
        sites = np.ascontiguousarray(sites, dtype=np.int64)
        if check:
            if sites.ndim != 2 or sites.shape[1] != 2:
                raise ValueError("sites must be an (L, 2) array")
            if len(sites) < 2 or len(sites) % 2:
                raise ValueError(f"loop length must be even and >= 2, got {len(sites)}")
            steps = np.diff(np.vstack([sites, sites[:1]]), axis=0)
            if not np.all(np.abs(steps).sum(axis=1) == 1):
                raise ValueError("consecutive sites must be nearest neighbours")
        self.sites = sites

    @property
    def length(self) -> int:
        return len(self.sites)

    @property
    def root(self) -> tuple[int, int]:
        return (int(self.sites[0, 0]), int(self.sites[0, 1]))

    @cached_property
    def trace(self) -> np.ndarray:
        """Distinct sites, lexicographically sorted."""
        s = self.sites
        lo = s.min(axis=0)
        h = int(s[:, 1].max() - lo[1]) + 1
        keys = np.unique((s[:, 0] - lo[0]) * h + (s[:, 1] - lo[1]))
        return np.stack([keys // h + lo[0], keys % h + lo[1]], axis=1)

    @cached_property
    def diameter(self) -> float:
        return trace_diameter(self.trace)

    def __len__(self) -> int:
        return len(self.sites)

    def __eq__(self, other) -> bool:
        return isinstance(other, RwLoop) and np.array_equal(self.sites, other.sites)

    def __hash__(self):
        return hash(self.sites.tobytes())

    def __repr__(self) -> str:
        return f"RwLoop(length={self.length}, root={self.root})"


def trace_diameter(trace: np.ndarray) -> float:
    """Euclidean diameter of a finite lattice point set."""
    trace = np.asarray(trace)
    if len(trace) <= 1:
        return 0.0
    # the farthest pair lies among the row-wise extreme points
    order = np.lexsort((trace[:, 0], trace[:, 1]))
    t = trace[order]
    ys = t[:, 1]
    first = np.r_[True, ys[1:] != ys[:-1]]
    last = np.r_[ys[1:] != ys[:-1], True]
    cand = t[first | last].astype(float)
    d2 = ((cand[:, None, :] - cand[None, :, :]) ** 2).sum(-1)
    return float(math.sqrt(d2.max()))


# ---------------------------------------------------------------------------
# bridges


def _bridge_steps(rng: np.random.Generator, two_n: int, m: int) -> np.ndarray:
    """Step codes (0=E,1=N,2=W,3=S) for ``m`` uniform closed walks of length 2n.

    The number k of east steps (= west steps) of a uniform closed walk is
    hypergeometric(n, n, n), since P(k) = C(n,k)^2 / C(2n,n); given k, all
    orderings of the step multiset are equally likely.
    """
    n = two_n // 2
    k = rng.hypergeometric(n, n, n, size=m)[:, None]
    j = np.arange(two_n)[None, :]
    codes = np.where(j < k, 0, np.where(j < 2 * k, 2, np.where(j < n + k, 1, 3))).astype(np.int8)
    return rng.permuted(codes, axis=1)


def _bridge_paths(roots: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """(m, 2n, 2) site arrays; position 0 is the root."""
    steps = STEPS[codes]
    pos = np.cumsum(steps, axis=1)
    paths = np.empty_like(pos)
    paths[:, 0] = 0
    paths[:, 1:] = pos[:, :-1]
    return paths + roots[:, None, :]


def sample_bridge(root, two_n: int, domain: LatticeDomain, rng: np.random.Generator, budget: int = 10_000) -> RwLoop:
    """Uniform closed 2n-step walk at ``root``, resampled until it stays in ``domain``."""
    if two_n < 2 or two_n % 2:
        raise ValueError(f"length must be even and >= 2, got {two_n}")
    if root not in domain:
        raise ValueError(f"root {tuple(root)} is outside the domain")
    root_arr = np.array([root], dtype=np.int64)
    batch = 1 if two_n > 4096 else 16
    tried = 0
    while tried < budget:
        m = min(batch, budget - tried)
        paths = _bridge_paths(np.repeat(root_arr, m, axis=0), _bridge_steps(rng, two_n, m))
        ok = domain.contains(paths[..., 0], paths[..., 1]).all(axis=1)
        hit = np.flatnonzero(ok)
        if len(hit):
            return RwLoop(paths[hit[0]], check=False)
        tried += m
    raise BudgetExceeded(f"no length-{two_n} bridge at {tuple(root)} stayed in the domain after {budget} tries")


# ---------------------------------------------------------------------------
# soups


@dataclass(frozen=True)
class SoupConfig:
    domain: LatticeDomain
    c: float
    cutoff: int = 4
    n_max: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_max is None:
            object.__setattr__(self, "n_max", 2 * self.domain.scale**2)
        if not self.c >= 0:
            raise InvalidConfig(f"intensity must be nonnegative, got {self.c}")
        if self.cutoff < 2 or self.cutoff % 2:
            raise InvalidConfig(f"cutoff must be even and >= 2, got {self.cutoff}")
        if self.n_max < self.cutoff or self.n_max % 2:
            raise InvalidConfig(f"n_max must be even and >= cutoff, got {self.n_max}")

    def with_seed(self, seed: int) -> "SoupConfig":
        return replace(self, seed=int(seed))

    @property
    def lengths(self) -> np.ndarray:
        return np.arange(self.cutoff, self.n_max + 1, 2)


@dataclass
class LoopSoupSample:
    """Loops plus the rooted draw record.

    ``draws`` has one row per rooted draw: (root x, root y, length, accepted).
    Rejected draws are bridges that left the domain.
    """

    config: SoupConfig
    loops: list
    draws: np.ndarray = field(repr=False)

    @property
    def tail_mass(self) -> float:
        return tail_mass(self.config.n_max, self.config.c)

    def __len__(self) -> int:
        return len(self.loops)

    def cell_counts(self, length: int, accepted_only: bool = True) -> np.ndarray:
        """Per-site rooted counts of ``length`` loops, aligned with ``domain.sites``."""
        d = self.draws
        sel = d[:, 2] == length
        if accepted_only:
            sel &= d[:, 3] == 1
        grid = self.config.domain.grid
        keys = grid.key(d[sel, :2])
        site_keys = grid.key(self.config.domain.sites)
        counts = np.zeros(len(site_keys), dtype=np.int64)
        pos = np.searchsorted(site_keys, keys)
        np.add.at(counts, pos, 1)
        return counts


def _with_traces(paths: np.ndarray, grid) -> list:
    """Loops for a batch of equal-length paths, with traces precomputed in one pass."""
    if len(paths) == 0:
        return []
    keys = np.sort(grid.key(paths), axis=1)
    first = np.ones(keys.shape, dtype=bool)
    first[:, 1:] = keys[:, 1:] != keys[:, :-1]
    out = []
    for path, row, sel in zip(paths, keys, first):
        loop = RwLoop(path, check=False)
        loop.__dict__["trace"] = grid.unkey(row[sel])
        out.append(loop)
    return out


def sample_loop_soup(config: SoupConfig) -> LoopSoupSample:
    """Poisson loop soup with rooted draws and domain thinning.

    Stream keys: the per-length totals come from ``(seed, COUNTS)``; roots
    and bridges of length L from ``(seed, LENGTH, L)``.
    """
    domain = config.domain
    sites = domain.sites
    n_sites = len(sites)
    lengths = config.lengths
    if config.c == 0 or n_sites == 0:
        return LoopSoupSample(config, [], np.zeros((0, 4), dtype=np.int64))
    means = n_sites * rooted_mass(lengths, config.c)
    totals = _rng.stream(config.seed, _rng.COUNTS).poisson(means)

    loops: list[RwLoop] = []
    records = []
    for length, k in zip(lengths[totals > 0], totals[totals > 0]):
        length = int(length)
        rng = _rng.stream(config.seed, _rng.LENGTH, length)
        roots = sites[rng.integers(n_sites, size=int(k))]
        # chunk long walks to bound memory
        chunk = max(1, 2_000_000 // length)
        for lo in range(0, int(k), chunk):
            r = roots[lo : lo + chunk]
            paths = _bridge_paths(r, _bridge_steps(rng, length, len(r)))
            ok = domain.contains(paths[..., 0], paths[..., 1]).all(axis=1)
            kept = paths[ok]
            loops.extend(_with_traces(kept, domain.grid))
            rec = np.empty((len(r), 4), dtype=np.int64)
            rec[:, :2] = r
            rec[:, 2] = length
            rec[:, 3] = ok
            records.append(rec)
    draws = np.concatenate(records) if records else np.zeros((0, 4), dtype=np.int64)
    return LoopSoupSample(config, loops, draws)


# ---------------------------------------------------------------------------
# distance between loop collections


def diameter_band(diam: float, d_ref: float) -> int:
    """Band 0 holds diameters > d_ref/2; band n holds (d_ref 2^{-n-1}, d_ref 2^{-n}]."""
    if diam > d_ref / 2:
        return 0
    if diam <= 0:
        return -1  # single-site traces have no scale; never compared
    return int(math.floor(math.log2(d_ref / diam)))


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    return max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0])


def _bottleneck(dist: np.ndarray) -> float:
    """min over bijections of the max matched distance (exact)."""
    n = dist.shape[0]
    if n == 0:
        return 0.0
    values = np.unique(dist)
    lo, hi = 0, len(values) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        g = csr_matrix(dist <= values[mid])
        if (maximum_bipartite_matching(g, perm_type="column") >= 0).sum() == n:
            hi = mid
        else:
            lo = mid + 1
    return float(values[lo])


def collection_distance(a: list, b: list, M: float) -> float:
    """d_M: bottleneck Hausdorff matching between equal-size collections, capped at M."""
    if len(a) != len(b):
        return M
    if not a:
        return 0.0
    dist = np.array([[hausdorff(x.trace, y.trace) for y in b] for x in a])
    return min(_bottleneck(dist), M)


def soup_distance(gamma: list, gamma2: list, M: float, d_ref: float) -> float:
    """sum_n 2^{-n} d_M(band_n(gamma), band_n(gamma2)) over diameter bands.

    Every band is matched exactly (bottleneck assignment by threshold search
    plus bipartite matching), so there is no size cut-over to a heuristic.
    """
    if M <= 0:
        raise ValueError("M must be positive")
    bands: dict[int, tuple[list, list]] = {}
    for side, coll in enumerate((gamma, gamma2)):
        for loop in coll:
            n = diameter_band(loop.diameter, d_ref)
            bands.setdefault(n, ([], []))[side].append(loop)
    total = 0.0
    for n, (a, b) in sorted(bands.items()):
        weight = 2.0 ** (-max(n, 0)) if n >= 0 else 0.0
        if weight:
            total += weight * collection_distance(a, b, M)
    return total
