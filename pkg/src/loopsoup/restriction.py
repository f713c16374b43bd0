"""Exponent algebra, half-disk hull maps, excursion ensembles and the
avoidance-probability experiments built on them.

For a Poisson ensemble of excursions, P(no path meets A) = exp(-lam m(A)).
The lattice constant inside ``lam`` is unknown, but it cancels in
log P(A1) / log P(A2), which must equal log phi'_A1(0) / log phi'_A2(0).

The half-plane with marked points 0 and infinity cannot be put on a finite
lattice without truncation bias, so the tests run in the conformally
equivalent strip {0 < Im w < pi} (see :class:`StripChart`): the arc [0, inf)
becomes the bottom edge, the hulls become caps hanging from the top edge, and
cutting the strip's two ends off costs only exp(-distance) corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from ._parallel import chunks, ordered_map
from ._rng import EXCURSION, REPLICA, SINGLE_LOOP, derive_seed, seed_hash, stream
from .lattice import LatticeDomain, build_domain, half_disk_sites
from .loops import SoupConfig, _bridge_paths, _bridge_steps, rooted_mass, sample_loop_soup
from .stats import EstimatorReport, wilson_interval
from .topology import SiteSet, encircles, separating_sites


class ParameterOutOfRange(ValueError):
    pass


class HullTouchesArc(ValueError):
    pass


class ConditioningFailure(RuntimeError):
    pass


KAPPA_MIN = Fraction(8, 3)
KAPPA_MAX = Fraction(4)


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _check_kappa(kappa) -> None:
    # the closed endpoint 8/3 is allowed so that the limit alpha = 5/8 can be evaluated
    if not (KAPPA_MIN <= kappa <= KAPPA_MAX):
        raise ParameterOutOfRange(f"kappa must lie in [8/3, 4], got {kappa}")


def c_of_kappa(kappa):
    _check_kappa(kappa)
    k = Fraction(kappa) if _is_exact(kappa) else float(kappa)
    return (3 * k - 8) * (6 - k) / (2 * k)


def alpha_of_kappa(kappa):
    _check_kappa(kappa)
    k = Fraction(kappa) if _is_exact(kappa) else float(kappa)
    return (6 - k) / (2 * k)


def _exact_sqrt(q: Fraction) -> Fraction | None:
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def kappa_of_c(c):
    """Root in (8/3, 4] of 3 k^2 + (2c - 26) k + 48 = 0.

    Exact when ``c`` is rational and the discriminant is a rational square.
    """
    if not (0 < c <= 1):
        raise ParameterOutOfRange(f"c must lie in (0, 1], got {c}")
    if _is_exact(c):
        b = 26 - 2 * Fraction(c)
        root = _exact_sqrt(b * b - 576)
        if root is not None:
            return (b - root) / 6
        c = float(c)
    b = 26.0 - 2.0 * c
    disc = max(b * b - 576.0, 0.0)
    # small root (b - sqrt(disc)) / 6, rewritten without cancellation
    return 96.0 / (b + math.sqrt(disc))


@dataclass(frozen=True)
class ExponentTriple:
    kappa: float
    c: float
    alpha: float

    def __post_init__(self):
        if not (KAPPA_MIN < self.kappa <= KAPPA_MAX):
            raise ParameterOutOfRange(f"kappa must lie in (8/3, 4], got {self.kappa}")
        if abs(float(c_of_kappa(self.kappa)) - float(self.c)) > 1e-12:
            raise ValueError("c inconsistent with kappa")
        if abs(float(alpha_of_kappa(self.kappa)) - float(self.alpha)) > 1e-12:
            raise ValueError("alpha inconsistent with kappa")

    @classmethod
    def from_kappa(cls, kappa) -> "ExponentTriple":
        return cls(kappa, c_of_kappa(kappa), alpha_of_kappa(kappa))

    @classmethod
    def from_c(cls, c) -> "ExponentTriple":
        return cls.from_kappa(kappa_of_c(c))


# --- hull maps -------------------------------------------------------------


@dataclass(frozen=True)
class HullMap:
    """z -> z + eps^2 / (z - a): removes the half-disk of radius eps at a < 0."""

    a: float
    eps: float

    def _num(self, z):
        if _is_exact(z) and _is_exact(self.a) and _is_exact(self.eps):
            return Fraction(z), Fraction(self.a), Fraction(self.eps)
        return z, self.a, self.eps

    def __call__(self, z):
        z, a, e = self._num(z)
        return z + e**2 / (z - a)

    def derivative(self, z):
        z, a, e = self._num(z)
        return 1 - e**2 / (z - a) ** 2

    @property
    def derivative_at_zero(self):
        return self.derivative(0 if _is_exact(self.a) else 0.0)


def hull_map(a, eps) -> HullMap:
    if not eps > 0:
        raise ParameterOutOfRange(f"eps must be positive, got {eps}")
    if not a < 0 or eps >= -a:
        raise HullTouchesArc(f"half-disk (a={a}, eps={eps}) reaches the arc [0, inf)")
    return HullMap(a, eps)


def hull_derivative_at(m: HullMap, x):
    """Derivative of the hull map at the boundary point ``x`` (off the hull)."""
    return m.derivative(x)


def predicted_ratio(h1: HullMap, h2: HullMap) -> float:
    return math.log(h1.derivative_at_zero) / math.log(h2.derivative_at_zero)


def predicted_avoidance(h: HullMap, alpha: float) -> float:
    return float(h.derivative_at_zero) ** alpha


# --- lattice hull regions ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class HullRegion:
    """A lattice site set standing for a hull, with the continuum map it discretizes."""

    sites: np.ndarray
    hull: HullMap | None = None
    label: str = ""

    @property
    def siteset(self) -> SiteSet:
        return SiteSet(self.sites)

    def __len__(self) -> int:
        return len(self.sites)

    def to_dict(self) -> dict:
        d = {"label": self.label, "size": len(self)}
        if self.hull is not None:
            d["a"] = float(self.hull.a)
            d["eps"] = float(self.hull.eps)
        return d


def lattice_half_disk(domain: LatticeDomain, a: int, eps: float) -> HullRegion:
    """The lattice half-disk of radius ``eps`` at bottom-row site (a, 0)."""
    return HullRegion(half_disk_sites(domain, (a, 0), eps), None, f"half-disk a={a} eps={eps}")


@dataclass(frozen=True)
class StripChart:
    """The strip {0 < Im w < pi} on a box of height ``height``.

    Site (x, y) sits at w = (x + iy)/k + center with k = (height + 1)/pi, so
    the absorbing rows y = 0 and y = height + 1 are the two boundary lines.
    z = exp(w) sends the bottom edge onto [0, inf) and the top edge onto
    (-inf, 0], where the hulls sit.  ``half_width`` is in strip units.
    """

    height: int = 144
    half_width: float = 8.0
    center: float = 0.0
    pad: float = 0.5

    @property
    def k(self) -> float:
        return (self.height + 1) / math.pi

    @property
    def width(self) -> int:
        return int(round(self.half_width * self.k))

    @property
    def domain(self) -> LatticeDomain:
        return build_domain("box", width=self.width, height=self.height)

    @property
    def arc(self) -> tuple[int, int]:
        return (-self.width, self.width)

    def to_half_plane(self, x, y):
        return np.exp((np.asarray(x) + 1j * np.asarray(y)) / self.k + self.center)

    def region(self, hull: HullMap) -> HullRegion:
        """Sites whose center lies within ``pad`` lattice units of the image of the hull.

        Distances are pulled back through the local scale |dz/dw| = |z|; the
        half-spacing pad makes the lattice set hit like the continuum set.
        """
        W, H = self.width, self.height
        xs, ys = np.meshgrid(np.arange(-W, W + 1), np.arange(1, H + 1), indexing="ij")
        z = self.to_half_plane(xs, ys)
        dist = (np.abs(z - float(hull.a)) - float(hull.eps)) * self.k / np.abs(z)
        keep = dist < self.pad
        sites = np.stack([xs[keep], ys[keep]], axis=1).astype(np.int64)
        return HullRegion(sites, hull, f"strip image of a={hull.a} eps={hull.eps}")

    @classmethod
    def for_hulls(cls, hulls, height: int = 144, half_width: float = 8.0, pad: float = 0.5) -> "StripChart":
        """Chart centered on the log-extent of the given hulls."""
        lo = min(math.log(-float(h.a) - float(h.eps)) for h in hulls)
        hi = max(math.log(-float(h.a) + float(h.eps)) for h in hulls)
        return cls(height, half_width, 0.5 * (lo + hi), pad)


def _bits_grid(domain: LatticeDomain, regions) -> np.ndarray:
    if domain.kind != "box":
        raise ValueError("excursion ensembles live in box domains")
    if len(regions) > 8:
        raise ValueError("at most 8 hulls per run")
    W, H = domain.width, domain.height
    bits = np.zeros((2 * W + 1, H + 2), dtype=np.uint8)
    for b, reg in enumerate(regions):
        s = np.asarray(reg.sites, dtype=np.int64).reshape(-1, 2)
        keep = (np.abs(s[:, 0]) <= W) & (s[:, 1] >= 0) & (s[:, 1] <= H)
        s = s[keep]
        bits[s[:, 0] + W, s[:, 1]] |= np.uint8(1 << b)
    return bits


# --- excursion ensembles -----------------------------------------------------


@dataclass(frozen=True)
class ExcursionLaw:
    """Poisson(lam * weight) excursions from every bottom-row site of the arc."""

    domain: LatticeDomain
    arc: tuple[int, int]
    lam: float
    weight: float = 1.0
    return_to_arc: bool = True
    max_steps: int = 10**8

    def __post_init__(self):
        if self.lam < 0:
            raise ParameterOutOfRange("lam must be >= 0")
        lo, hi = self.arc
        if self.domain.kind != "box" or lo > hi or lo < -self.domain.width or hi > self.domain.width:
            raise ParameterOutOfRange(f"arc {self.arc} is not a bottom segment of the box")


@dataclass(frozen=True)
class SoupLaw:
    config: SoupConfig


@dataclass(eq=False)
class ExcursionEnsemble:
    law: ExcursionLaw
    seed: int
    replica: int
    paths: list = field(default_factory=list)
    codes: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int8))

    @property
    def lam(self) -> float:
        return self.law.lam

    @property
    def arc(self) -> tuple[int, int]:
        return self.law.arc

    def __len__(self) -> int:
        return len(self.paths)

    def starts(self) -> np.ndarray:
        return np.array([p[0] for p in self.paths], dtype=np.int64).reshape(-1, 2)

    def returned_to_arc(self) -> np.ndarray:
        lo, hi = self.law.arc
        ends = np.array([p[-1] for p in self.paths], dtype=np.int64).reshape(-1, 2)
        if len(ends) == 0:
            return np.zeros(0, dtype=bool)
        return (self.codes == _kernels.RETURNED) & (ends[:, 0] >= lo) & (ends[:, 0] <= hi)

    def kept(self) -> list:
        """Paths in the restriction sample (arc-to-arc only when the law says so)."""
        if not self.law.return_to_arc:
            return list(self.paths)
        keep = self.returned_to_arc()
        return [p for p, k in zip(self.paths, keep) if k]

    def trace(self) -> SiteSet:
        kept = self.kept()
        if not kept:
            return SiteSet()
        return SiteSet(np.concatenate(kept))


def sample_excursions(domain: LatticeDomain, arc, lam: float, seed: int = 0, replica: int = 0,
                      weight: float = 1.0, return_to_arc: bool = True) -> ExcursionEnsemble:
    """One replica of the excursion Poisson process, with full paths.

    Each path is (x, 0), (x, 1), ... and stops on its first return to the
    bottom row or on its last in-domain site before leaving the box.
    """
    law = ExcursionLaw(domain, tuple(int(v) for v in arc), float(lam), weight, return_to_arc)
    lo, hi = law.arc
    ens = ExcursionEnsemble(law, int(seed), int(replica))
    if lam == 0:
        return ens
    counts = stream(seed, EXCURSION, replica).poisson(lam * weight, hi - lo + 1)
    starts = np.repeat(np.arange(lo, hi + 1, dtype=np.int64), counts)
    if len(starts) == 0:
        return ens
    xs, ys, off, code = _kernels.excursion_paths(
        starts, np.uint64(derive_seed(seed, EXCURSION, replica, 1)), domain.width, domain.height, law.max_steps
    )
    paths = []
    for j in range(len(starts)):
        p = np.stack([xs[off[j] : off[j + 1]], ys[off[j] : off[j + 1]]], axis=1)
        if code[j] == _kernels.ESCAPED:
            p = p[:-1]
        paths.append(p)
    ens.paths = paths
    ens.codes = code
    return ens


# --- avoidance estimates -----------------------------------------------------


def _excursion_chunk(args):
    law, bits, seeds = args
    lo, hi = law.arc
    out, counts = _kernels.avoidance_bits(
        seeds, law.domain.width, law.domain.height, law.lam * law.weight, lo, hi, bits,
        law.max_steps, law.return_to_arc,
    )
    return out, counts


def _soup_chunk(args):
    config, regions, seeds = args
    out = np.zeros(len(seeds), dtype=np.uint8)
    for r, s in enumerate(seeds):
        sample = sample_loop_soup(config.with_seed(int(s)))
        if not sample.loops:
            continue
        allsites = np.concatenate([lp.trace for lp in sample.loops])
        for b, reg in enumerate(regions):
            if reg.siteset.contains(allsites).any():
                out[r] |= np.uint8(1 << b)
    return out, np.array([0] * len(seeds))


def hit_bits(law, regions, replicas: int, seed: int = 0, chunk: int = 250) -> np.ndarray:
    """Per-replica bitmask of the regions met by the ensemble (bit b for region b)."""
    regions = list(regions)
    seeds = np.array([derive_seed(seed, REPLICA, r) for r in range(replicas)], dtype=np.uint64)
    if isinstance(law, ExcursionLaw):
        bits = _bits_grid(law.domain, regions)
        tasks = [(law, bits, seeds[a:b]) for a, b in chunks(replicas, chunk)]
        parts = ordered_map(_excursion_chunk, tasks)
    elif isinstance(law, SoupLaw):
        tasks = [(law.config, regions, seeds[a:b]) for a, b in chunks(replicas, max(1, chunk // 25))]
        parts = ordered_map(_soup_chunk, tasks)
    else:
        raise TypeError(f"unknown law {law!r}")
    if not parts:
        return np.zeros(0, dtype=np.uint8)
    return np.concatenate([p[0] for p in parts])


@dataclass(frozen=True)
class RestrictionEstimate:
    hull: dict
    estimate: EstimatorReport
    predicted: float | None = None
    z: float | None = None
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {
            "hull": self.hull,
            "estimate": self.estimate.to_dict(),
            "predicted": self.predicted,
            "z": self.z,
            "flags": list(self.flags),
        }


def avoidance_probability(law, region: HullRegion, replicas: int = 1000, seed: int = 0,
                          predicted: float | None = None) -> RestrictionEstimate:
    """P(no path or loop meets the region), with a Wilson interval."""
    bits = hit_bits(law, [region], replicas, seed)
    avoid = int(np.sum(bits == 0))
    seeds = [derive_seed(seed, REPLICA, 0), replicas]
    est = wilson_interval(avoid, replicas, seeds=seeds)
    flags = []
    if avoid in (0, replicas):
        flags.append("degenerate-ci")
    z = None
    if predicted is not None:
        sd = math.sqrt(max(est.estimate * (1 - est.estimate), 1e-300) / replicas)
        z = (est.estimate - predicted) / sd if avoid not in (0, replicas) else None
    return RestrictionEstimate(region.to_dict(), est, predicted, z, tuple(flags))


@dataclass(frozen=True)
class RatioTestReport:
    inputs: dict
    p1: EstimatorReport
    p2: EstimatorReport
    p_both: float
    ratio: float
    se: float
    predicted: float
    z: float
    flags: tuple = ()

    @property
    def degenerate(self) -> bool:
        return "degenerate" in self.flags

    def to_dict(self) -> dict:
        return {
            "inputs": self.inputs,
            "estimate": {"ratio": self.ratio, "se": self.se, "p1": self.p1.to_dict(), "p2": self.p2.to_dict(),
                         "p_both": self.p_both},
            "CI": [self.ratio - 1.96 * self.se, self.ratio + 1.96 * self.se],
            "predicted": self.predicted,
            "z": self.z,
            "flags": list(self.flags),
        }


def log_ratio_delta(p1: float, p2: float, p12: float, n: int) -> tuple[float, float]:
    """log p1 / log p2 and its delta-method standard error.

    The two indicators come from the same replicas, so their covariance
    (through p12 = P(avoid both)) enters the variance.
    """
    l1, l2 = math.log(p1), math.log(p2)
    r = l1 / l2
    v1 = (1 - p1) / (n * p1)
    v2 = (1 - p2) / (n * p2)
    cov = (p12 - p1 * p2) / (n * p1 * p2)
    var = r * r * (v1 / l1**2 + v2 / l2**2 - 2 * cov / (l1 * l2))
    return r, math.sqrt(max(var, 0.0))


def restriction_ratio_test(lam: float, hull1: HullMap, hull2: HullMap, replicas: int = 10_000, seed: int = 0,
                           chart: StripChart | None = None) -> RatioTestReport:
    """Compare log P(avoid A1) / log P(avoid A2) with log phi1'(0) / log phi2'(0)."""
    chart = chart or StripChart.for_hulls([hull1, hull2])
    regions = [chart.region(hull1), chart.region(hull2)]
    law = ExcursionLaw(chart.domain, chart.arc, lam)
    bits = hit_bits(law, regions, replicas, seed)
    a1 = int(np.sum((bits & 1) == 0))
    a2 = int(np.sum((bits & 2) == 0))
    a12 = int(np.sum(bits == 0))
    seeds = [derive_seed(seed, REPLICA, 0), replicas]
    p1 = wilson_interval(a1, replicas, seeds=seeds)
    p2 = wilson_interval(a2, replicas, seeds=seeds)
    pred = predicted_ratio(hull1, hull2)
    inputs = {
        "lambda": lam, "replicas": replicas, "seed": seed,
        "hull1": {"a": float(hull1.a), "eps": float(hull1.eps), "sites": len(regions[0])},
        "hull2": {"a": float(hull2.a), "eps": float(hull2.eps), "sites": len(regions[1])},
        "chart": {"kind": "strip", "height": chart.height, "half_width": chart.half_width,
                  "center": chart.center, "pad": chart.pad, "box_width": chart.width},
        "seed_hash": seed_hash(seeds),
    }
    flags = []
    if min(a1, a2) == 0 or max(a1, a2) == replicas:
        flags.append("degenerate")
        return RatioTestReport(inputs, p1, p2, a12 / replicas, float("nan"), float("nan"), pred, float("nan"),
                               tuple(flags))
    for p in (p1.estimate, p2.estimate):
        if not 0.05 <= p <= 0.95:
            flags.append("avoidance-outside-[0.05,0.95]")
    r, se = log_ratio_delta(p1.estimate, p2.estimate, a12 / replicas, replicas)
    if se == 0:
        z = 0.0 if r == pred else math.copysign(math.inf, r - pred)
    else:
        z = (r - pred) / se
    return RatioTestReport(inputs, p1, p2, a12 / replicas, r, se, pred, z, tuple(flags))


def calibrate_intensity(hull: HullMap, alpha: float, lam: float = 10.0, replicas: int = 2000, seed: int = 0,
                        chart: StripChart | None = None) -> EstimatorReport:
    """The intensity lam* at which P(avoid hull) = phi'(0)^alpha.

    One pilot run at ``lam`` estimates m(A) = -log P / lam; then
    lam* = alpha * (-log phi'(0)) / m(A).  The interval maps the Wilson bounds.
    """
    chart = chart or StripChart.for_hulls([hull])
    law = ExcursionLaw(chart.domain, chart.arc, lam)
    est = avoidance_probability(law, chart.region(hull), replicas, seed).estimate
    if est.estimate in (0.0, 1.0):
        raise ConditioningFailure("pilot avoidance probability is 0 or 1; change the pilot intensity")
    target = -alpha * math.log(float(hull.derivative_at_zero))

    def lam_star(p):
        return target * lam / -math.log(p)

    hi_p = min(est.ci_high, 1 - 1e-12)
    lo_p = max(est.ci_low, 1e-300)
    return EstimatorReport(lam_star(est.estimate), lam_star(lo_p), lam_star(hi_p), replicas, "wilson-mapped", est.seeds)


# --- cut-point contrast ------------------------------------------------------


def loop_cut_sites(trace, point) -> SiteSet:
    """Sites of a loop separating the component of ``point`` from the exterior."""
    return separating_sites(trace, point)


def excursion_cut_sites(ensemble: ExcursionEnsemble, point) -> SiteSet:
    """Arc (wall-row) sites separating the component of ``point`` from the exterior.

    The arc row plays the discovered boundary piece: the exterior lies below
    it, so a wall site is a cut point iff the component of ``point`` in the
    complement of (excursions + arc) reaches the site just above it.
    """
    lo, hi = ensemble.arc
    wall = np.stack([np.arange(lo, hi + 1), np.zeros(hi - lo + 1, dtype=np.int64)], axis=1)
    return separating_sites(wall, point, walls=ensemble.trace())


def excursion_encircles(ensemble: ExcursionEnsemble, point) -> bool:
    lo, hi = ensemble.arc
    wall = np.stack([np.arange(lo, hi + 1), np.zeros(hi - lo + 1, dtype=np.int64)], axis=1)
    return encircles(ensemble.trace() | SiteSet(wall), point)


def sample_encircling_loops(radius: int, n: int, seed: int = 0, point=(0, 0), min_length: int | None = None,
                            max_tries: int = 10**7) -> tuple[list, int]:
    """Single loops of the rooted loop measure in the disk, conditioned to encircle ``point``.

    Lengths are drawn from the loop measure restricted to [min_length, 2 R^2]
    and roots uniformly; a draw is kept iff it stays in the disk and its
    filling contains ``point``.  Returns the traces and the number of draws.
    """
    domain = build_domain("disk", radius=radius)
    sites = domain.sites
    if min_length is None:
        min_length = max(100, int(0.1 * radius * radius))
    min_length += min_length % 2
    lengths = np.arange(min_length, max(min_length, 2 * radius * radius) + 1, 2)
    w = rooted_mass(lengths)
    w = w / w.sum()
    rng = stream(seed, SINGLE_LOOP, radius)
    out: list = []
    tries = 0
    while len(out) < n:
        if tries >= max_tries:
            raise ConditioningFailure(f"only {len(out)} encircling loops in {tries} draws")
        length = int(rng.choice(lengths, p=w))
        m = max(1, 20_000 // length)
        roots = sites[rng.integers(len(sites), size=m)]
        paths = _bridge_paths(roots, _bridge_steps(rng, length, m))
        tries += m
        ok = domain.contains(paths[..., 0], paths[..., 1]).all(axis=1)
        for p in paths[ok]:
            t = SiteSet(p)
            if len(out) < n and encircles(t, point):
                out.append(t)
    return out, tries


@dataclass(frozen=True)
class CutpointContrastReport:
    radii: tuple
    lam: float
    loop: tuple  # EstimatorReport per radius
    excursion: tuple
    loop_draws: tuple
    excursion_draws: tuple

    @property
    def gap_z(self) -> float:
        """(loop - excursion) frequency at the largest radius over its standard error."""
        a, b = self.loop[-1], self.excursion[-1]
        var = a.estimate * (1 - a.estimate) / a.n + b.estimate * (1 - b.estimate) / b.n
        if var == 0:
            return math.inf if a.estimate > b.estimate else 0.0
        return (a.estimate - b.estimate) / math.sqrt(var)

    @property
    def excursion_nonincreasing(self) -> bool:
        """Each excursion frequency lies at or below the previous radius' upper CI bound."""
        ex = self.excursion
        return all(ex[i + 1].estimate <= ex[i].ci_high for i in range(len(ex) - 1))

    def to_dict(self) -> dict:
        return {
            "inputs": {"radii": list(self.radii), "lambda": self.lam},
            "estimate": {
                "loop": [r.to_dict() for r in self.loop],
                "excursion": [r.to_dict() for r in self.excursion],
                "loop_draws": list(self.loop_draws),
                "excursion_draws": list(self.excursion_draws),
            },
            "gap_z": self.gap_z,
            "excursion_nonincreasing": self.excursion_nonincreasing,
        }


def cutpoint_contrast(radii=(32, 64, 96), replicas: int = 400, lam: float | None = None, c: float = 0.0,
                      seed: int = 0, max_tries: int = 20_000) -> CutpointContrastReport:
    """Frequency of cut points w.r.t. a marked point: single loops vs excursion ensembles.

    Loops live in the disk of radius R and must encircle the origin.  Excursion
    ensembles live in the box |x| <= R, 0 <= y <= R with the whole bottom row
    as arc and must encircle (0, R/4).  Without ``lam`` the intensity is the
    calibrated one for exponent alpha(c) (5/8 when c = 0, the single-loop limit).
    """
    radii = tuple(int(r) for r in radii)
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must increase")
    if lam is None:
        alpha = 5 / 8 if c == 0 else float(alpha_of_kappa(kappa_of_c(c)))
        lam = calibrate_intensity(hull_map(-2, 1), alpha, 10.0, 2000, seed,
                                  StripChart.for_hulls([hull_map(-2, 1)], height=48)).estimate
    loop_reports, ex_reports, loop_draws, ex_draws = [], [], [], []
    for R in radii:
        traces, tries = sample_encircling_loops(R, replicas, seed)
        hits = sum(1 for t in traces if len(loop_cut_sites(t, (0, 0))) > 0)
        loop_reports.append(wilson_interval(hits, replicas, seeds=[seed, R]))
        loop_draws.append(tries)

        domain = build_domain("box", width=R, height=R)
        point = (0, R // 4)
        kept = hits = r = 0
        while kept < replicas:
            if r >= max_tries:
                raise ConditioningFailure(f"excursions encircled {point} only {kept} times in {r} replicas")
            ens = sample_excursions(domain, (-R, R), lam, seed=derive_seed(seed, R), replica=r)
            r += 1
            if len(ens) == 0 or not excursion_encircles(ens, point):
                continue
            kept += 1
            hits += len(excursion_cut_sites(ens, point)) > 0
        ex_reports.append(wilson_interval(hits, replicas, seeds=[seed, R]))
        ex_draws.append(r)
    return CutpointContrastReport(radii, float(lam), tuple(loop_reports), tuple(ex_reports), tuple(loop_draws),
                                  tuple(ex_draws))
