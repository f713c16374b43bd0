"""Chord exploration, pinned clusters, the pinning exponent and the gluing event.

All conditional laws are realized by plain rejection: soups are drawn from
keyed streams (seed, REPLICA, try) until the event holds, and acceptance
counts are always reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ._parallel import ordered_map
from ._rng import REPLICA, derive_seed
from .clusters import ClusterSet, CompleteCluster, build_clusters
from .lattice import LatticeDomain, half_disk_sites
from .loops import LoopSoupSample, SoupConfig, rooted_mass, sample_loop_soup
from .stats import EstimatorReport, wilson_interval
from .topology import CROSS, Contour, SiteSet


class NoSurroundingCluster(LookupError):
    pass


class TriesExhausted(RuntimeError):
    def __init__(self, message: str, tries: int, accepted: int, surrounded: int = 0):
        super().__init__(message)
        self.tries = tries
        self.accepted = accepted
        self.surrounded = surrounded

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.tries if self.tries else 0.0


class DegenerateFit(ValueError):
    pass


# --- exploration -------------------------------------------------------------


def default_chord(domain: LatticeDomain, target=(0, 0)) -> np.ndarray:
    """Sites of the row through ``target`` from the right boundary leftward to it."""
    tx, ty = int(target[0]), int(target[1])
    xmax = domain.bbox[2]
    xs = np.arange(xmax, tx - 1, -1)
    keep = domain.contains(xs, np.full(len(xs), ty))
    xs = xs[keep]
    return np.stack([xs, np.full(len(xs), ty)], axis=1).astype(np.int64)


@dataclass
class ExplorationResult:
    T: tuple
    discovered: SiteSet
    remaining: SiteSet
    cluster: int
    absorbed: tuple = ()  # outermost clusters met by the chord before T

    def to_dict(self) -> dict:
        return {
            "status": "ok",
            "T": list(self.T),
            "discovered": self.discovered.coords.tolist(),
            "remaining_size": len(self.remaining),
            "cluster": self.cluster,
            "absorbed": list(self.absorbed),
        }


def explore_chord(sample: LoopSoupSample, clusters: ClusterSet | None = None, target=(0, 0),
                  chord=None) -> ExplorationResult:
    """Walk the chord from its boundary end until the trace of the cluster around ``target``.

    T is the first chord site on the trace of theta_0, the outermost cluster
    whose filling holds the target.  The discovered set is the filling of the
    chord sites before T together with the fillings of the outermost clusters
    they meet; the remaining set is the component of the target in the rest
    of the domain.
    """
    domain = sample.config.domain
    cs = clusters if clusters is not None else build_clusters(sample)
    theta0 = cs.owner_of(target)
    if theta0 is None:
        raise NoSurroundingCluster(f"no cluster surrounds {tuple(target)}")
    chord = default_chord(domain, target) if chord is None else np.asarray(chord, dtype=np.int64).reshape(-1, 2)
    g = cs.grid
    ci, cj = chord[:, 0] - g.x0, chord[:, 1] - g.y0
    on_theta = np.flatnonzero(cs.site_label[ci, cj] == theta0)
    if len(on_theta) == 0:
        raise NoSurroundingCluster("the chord never meets the surrounding cluster")
    t = int(on_theta[0])
    owners = cs._owner[ci[:t], cj[:t]]
    absorbed = tuple(sorted(set(int(o) for o in owners[owners >= 0].tolist())))

    block = np.zeros(g.shape, dtype=bool)
    block[ci[:t], cj[:t]] = True
    for cid in absorbed:
        m, mx, my = cs._filled(cid)
        block[mx - g.x0 : mx - g.x0 + m.shape[0], my - g.y0 : my - g.y0 + m.shape[1]] |= m
    disc = ndimage.binary_fill_holes(block, structure=CROSS) & domain.mask

    free = domain.mask & ~disc
    labels, _ = ndimage.label(free, structure=CROSS)
    lab = labels[int(target[0]) - g.x0, int(target[1]) - g.y0]
    rem = labels == lab if lab > 0 else np.zeros_like(free)
    return ExplorationResult(
        tuple(int(v) for v in chord[t]),
        SiteSet.from_mask(disc, g.x0, g.y0),
        SiteSet.from_mask(rem, g.x0, g.y0),
        int(theta0),
        absorbed,
    )


@dataclass(frozen=True)
class MarkovReport:
    length: int
    expected: float
    mean: float
    se: float
    cells: int
    explorations: int
    tries: int

    @property
    def z(self) -> float:
        return (self.mean - self.expected) / self.se if self.se > 0 else 0.0

    def to_dict(self) -> dict:
        return {"length": self.length, "expected": self.expected, "mean": self.mean, "se": self.se,
                "z": self.z, "cells": self.cells, "explorations": self.explorations, "tries": self.tries}


def _markov_one(args):
    config, seed, target, margin, length = args
    sample = sample_loop_soup(config.with_seed(seed))
    try:
        res = explore_chord(sample, None, target)
    except NoSurroundingCluster:
        return None
    g = config.domain.grid
    rem = res.remaining.window(g.x0, g.y0, g.nx, g.ny)
    deep = ndimage.binary_erosion(rem, structure=CROSS, iterations=margin, border_value=0)
    d = sample.draws
    sel = (d[:, 2] == length) & (d[:, 3] == 1)
    counts = np.zeros(g.shape, dtype=np.int64)
    np.add.at(counts, (d[sel, 0] - g.x0, d[sel, 1] - g.y0), 1)
    c = counts[deep]
    return int(c.size), int(c.sum()), int((c * c).sum())


def markov_consistency(config: SoupConfig, explorations: int = 500, seed: int = 0, target=(0, 0),
                       margin: int = 3, length: int = 2, max_tries: int | None = None) -> MarkovReport:
    """Per-cell rooted ``length``-loop means deep inside the remaining component.

    Cells are the sites at least ``margin`` steps from the complement of the
    remaining component; the reference is the free mean c p_L / L.
    """
    if length < config.cutoff:
        raise ValueError(f"length {length} is below the cutoff {config.cutoff}")
    max_tries = max_tries or 4 * explorations
    cells = total = sq = done = tries = 0
    batch = 10
    while done < explorations and tries < max_tries:
        seeds = [derive_seed(seed, REPLICA, tries + j) for j in range(batch)]
        tries += batch
        for r in ordered_map(_markov_one, [(config, s, target, margin, length) for s in seeds]):
            if r is None or done >= explorations:
                continue
            done += 1
            cells += r[0]
            total += r[1]
            sq += r[2]
    if done < explorations:
        raise TriesExhausted(f"{done} explorations in {tries} tries", tries, done)
    mean = total / cells
    var = sq / cells - mean * mean
    se = math.sqrt(var / cells)
    expected = float(rooted_mass(np.array([length]), config.c)[0])
    return MarkovReport(length, expected, mean, se, cells, done, tries)


# --- pinned clusters ---------------------------------------------------------


@dataclass
class PinnedSample:
    cluster: CompleteCluster
    eps: float | None
    rejections: int
    seed: int
    surrounded: int = 0
    event: dict = field(default_factory=dict)

    @property
    def tries(self) -> int:
        return self.rejections + 1

    def to_dict(self) -> dict:
        cc = self.cluster
        return {
            "eps": self.eps,
            "rejections": self.rejections,
            "surrounded": self.surrounded,
            "seed": self.seed,
            "cluster": {"core": cc.core, "loops": len(cc), "filling_area": len(cc.filling),
                        "diameter": cc.diameter},
            "event": self.event,
        }


def _pin_region(domain: LatticeDomain, pin, eps) -> np.ndarray:
    return half_disk_sites(domain, pin, eps)


def _touches(cs: ClusterSet, cid: int, region: np.ndarray) -> bool:
    if len(region) == 0:
        return False
    g = cs.grid
    return bool((cs.site_label[region[:, 0] - g.x0, region[:, 1] - g.y0] == cid).any())


def _pin_trial(args):
    """(surrounded, touched per eps) for one soup."""
    config, seed, anchor, regions = args
    sample = sample_loop_soup(config.with_seed(seed))
    cs = build_clusters(sample)
    cid = cs.owner_of(anchor)
    if cid is None:
        return False, [False] * len(regions)
    return True, [_touches(cs, cid, r) for r in regions]


def sample_pinned_cluster(config: SoupConfig, anchor=(0, 0), pin=None, eps: float = 1.0, max_tries: int = 1000,
                          seed: int = 0) -> PinnedSample:
    """Rejection sampler: the cluster surrounding ``anchor`` must meet the half-disk at ``pin``."""
    domain = config.domain
    if pin is None:
        pin = (domain.bbox[2], 0)
    region = _pin_region(domain, pin, eps)
    surrounded = 0
    for t in range(max_tries):
        s = derive_seed(seed, REPLICA, t)
        sample = sample_loop_soup(config.with_seed(s))
        cs = build_clusters(sample)
        cid = cs.owner_of(anchor)
        if cid is None:
            continue
        surrounded += 1
        if _touches(cs, cid, region):
            return PinnedSample(cs.complete(cid), eps, t, s, surrounded)
    raise TriesExhausted(
        f"no pinned cluster in {max_tries} tries (surrounded {surrounded} times)", max_tries, 0, surrounded
    )


def pinning_probability(config: SoupConfig, anchor, pin, eps_values, samples: int, seed: int = 0,
                        stream_key: int = 0) -> tuple[list[EstimatorReport], int]:
    """Estimates of u(eps) = P(cluster around anchor meets D(pin, eps)) from one set of soups."""
    domain = config.domain
    regions = [_pin_region(domain, pin, e) for e in eps_values]
    seeds = [derive_seed(seed, REPLICA, stream_key, t) for t in range(samples)]
    results = ordered_map(_pin_trial, [(config, s, anchor, regions) for s in seeds])
    surrounded = sum(1 for r in results if r[0])
    reports = []
    for k in range(len(eps_values)):
        hits = sum(1 for r in results if r[1][k])
        reports.append(wilson_interval(hits, samples, seeds=seeds))
    return reports, surrounded


@dataclass(frozen=True)
class PinningScalingReport:
    eps: tuple
    u: tuple  # EstimatorReport per eps
    beta: EstimatorReport
    violations: tuple = ()

    def to_dict(self) -> dict:
        return {
            "inputs": {"eps": list(self.eps)},
            "estimate": {"u": [r.to_dict() for r in self.u], "beta": self.beta.to_dict()},
            "CI": [self.beta.ci_low, self.beta.ci_high],
            "violations": list(self.violations),
        }


def fit_power_law(eps, u: list[EstimatorReport]) -> EstimatorReport:
    """Weighted least squares of log u on log eps; weights n u / (1 - u)."""
    x = np.log(np.asarray(eps, dtype=float))
    p = np.array([r.estimate for r in u])
    n = np.array([r.n for r in u], dtype=float)
    if (p <= 0).any():
        raise DegenerateFit("an estimate of u is zero")
    y = np.log(p)
    var = np.where(p < 1, (1 - p) / (n * p), 1 / (n * n))
    w = 1 / var
    X = np.stack([np.ones_like(x), x], axis=1)
    A = X.T @ (w[:, None] * X)
    cov = np.linalg.inv(A)
    coef = cov @ (X.T @ (w * y))
    se = math.sqrt(cov[1, 1])
    beta = float(coef[1])
    return EstimatorReport(beta, beta - 1.96 * se, beta + 1.96 * se, int(n.sum()), "delta", u[0].seeds)


def estimate_pinning_scaling(config: SoupConfig, anchor=(0, 0), pin=None, eps_grid=(1, 2, 4),
                             samples: int = 500, seed: int = 0) -> PinningScalingReport:
    """u(eps) on a geometric grid (an independent set of soups per eps) and the fitted exponent."""
    eps_grid = tuple(float(e) for e in eps_grid)
    if len(eps_grid) < 3:
        raise ValueError("need at least three eps values")
    if pin is None:
        pin = (config.domain.bbox[2], 0)
    reports = []
    for k, e in enumerate(eps_grid):
        r, _ = pinning_probability(config, anchor, pin, [e], samples, seed, stream_key=k)
        reports.append(r[0])
    violations = []
    order = np.argsort(eps_grid)
    for a, b in zip(order, order[1:]):
        if reports[a].ci_low > reports[b].ci_high:
            violations.append(f"u({eps_grid[a]}) > u({eps_grid[b]})")
    beta = fit_power_law(eps_grid, reports)
    return PinningScalingReport(eps_grid, tuple(reports), beta, tuple(violations))


# --- gluing event --------------------------------------------------------------


def glued_event(contour: Contour, pin, delta: float, w0: int) -> tuple[bool, int]:
    """Whether the contour, read counterclockwise from the pin, reaches x = w0 inside the rectangle.

    Reading starts at the south edge of the pin site.  Returns the verdict and
    the number of contour edges read.
    """
    inside = contour.inside
    px, py = int(pin[0]), int(pin[1])
    start = np.flatnonzero((inside[:, 0] == px) & (inside[:, 1] == py))
    if len(start) == 0:
        return False, 0
    # prefer the edge under the pin (heading east)
    south = [k for k in start.tolist() if tuple(contour.corners[k]) == (px, py)]
    k0 = south[0] if south else int(start[0])
    seq = np.roll(inside, -k0, axis=0)
    for k, (x, y) in enumerate(seq.tolist()):
        if x >= w0 and y <= 2 * delta:
            return True, k + 1
        if x < px - delta or y > py + 2 * delta:
            return False, k + 1
    return False, len(seq)


def sample_glued_near(config: SoupConfig, delta: float, w0: int | None = None, pin=(0, 0), max_tries: int = 1000,
                      seed: int = 0) -> PinnedSample:
    """Rejection sampler for the gluing event E_delta in a half-plane box."""
    domain = config.domain
    if domain.kind != "box":
        raise ValueError("the gluing event lives in a half-plane box")
    if w0 is None:
        w0 = domain.width // 2
    pinned = 0
    for t in range(max_tries):
        s = derive_seed(seed, REPLICA, t)
        sample = sample_loop_soup(config.with_seed(s))
        cs = build_clusters(sample)
        cid = cs.owner_of(pin)
        if cid is None:
            continue
        pinned += 1
        cc = cs.complete(cid)
        ok, read = glued_event(cc.contour, pin, delta, w0)
        if ok:
            return PinnedSample(cc, None, t, s, pinned, {"delta": delta, "w0": w0, "edges_read": read})
    raise TriesExhausted(f"E_delta not met in {max_tries} tries (pinned {pinned} times)", max_tries, 0, pinned)
