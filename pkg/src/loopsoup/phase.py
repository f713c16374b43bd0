"""Hookup scan across intensities.

For every macroscopic complete cluster (core diameter >= R/4) we ask
whether its boundary-touching loops form one cluster on their own.  Below
the critical intensity they do; above it the outer boundary can be pinched
off by cut points that belong to no loop, so the fraction should fall with c.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import ordered_map
from ._rng import REPLICA, derive_seed
from .clusters import boundary_touching_loops, build_clusters
from .lattice import LatticeDomain, build_domain
from .loops import SoupConfig, sample_loop_soup
from .stats import EstimatorReport, GofReport, InsufficientData, spearman_monotone, wilson_interval
from .topology import subset_connected


def hookups(sample, min_diameter: float) -> list[bool]:
    """Hookup flag for each macroscopic complete cluster of one sample."""
    cs = build_clusters(sample)
    out = []
    for cid in cs.outermost:
        x0, y0, x1, y1 = cs.bbox(cid)
        # the diameter is at least the larger bbox side
        if max(x1 - x0, y1 - y0) * 1.4143 < min_diameter:
            continue
        if cs.diameter(cid) < min_diameter:
            continue
        cc = cs.complete(cid)
        idx = boundary_touching_loops(cc)
        out.append(subset_connected([sample.loops[i].trace for i in idx]))
    return out


def _scan_one(args):
    config, min_diameter, seeds = args
    flags = []
    for s in seeds:
        flags.extend(hookups(sample_loop_soup(config.with_seed(int(s))), min_diameter))
    return flags


@dataclass(frozen=True)
class PhaseScanReport:
    c_grid: tuple
    fractions: tuple  # EstimatorReport per c
    samples: tuple
    spearman: GofReport | None
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {
            "inputs": {"c_grid": list(self.c_grid)},
            "estimate": [f.to_dict() for f in self.fractions],
            "samples": list(self.samples),
            "spearman": None if self.spearman is None else self.spearman.to_dict(),
            "flags": list(self.flags),
        }

    def csv(self) -> str:
        rows = ["c,fraction,ci_low,ci_high,clusters,samples"]
        for c, f, n in zip(self.c_grid, self.fractions, self.samples):
            rows.append(f"{c!r},{f.estimate!r},{f.ci_low!r},{f.ci_high!r},{f.n},{n}")
        return "\n".join(rows) + "\n"


def phase_scan(c_grid, domain: LatticeDomain | None = None, cutoff: int = 4, min_clusters: int = 500,
               seed: int = 0, max_samples: int = 5000, batch: int = 20, permutations: int = 10_000) -> PhaseScanReport:
    """Hookup fraction per intensity with Wilson intervals and a Spearman trend test."""
    domain = domain or build_domain("disk", radius=64)
    min_diameter = domain.scale / 4
    fractions, counts, flags = [], [], []
    for ci, c in enumerate(c_grid):
        config = SoupConfig(domain, float(c), cutoff, seed=0)
        found: list[bool] = []
        used = 0
        while len(found) < min_clusters and used < max_samples:
            # a fixed batch layout keeps the result independent of the worker count
            n = min(batch, max_samples - used)
            seeds = [derive_seed(seed, REPLICA, ci, used + j) for j in range(n)]
            parts = ordered_map(_scan_one, [(config, min_diameter, seeds[j : j + 1]) for j in range(n)])
            for p in parts:
                found.extend(p)
            used += n
        if len(found) < min_clusters:
            flags.append(f"insufficient-clusters c={c}")
        if not found:
            raise InsufficientData(f"no macroscopic cluster at c={c}")
        fractions.append(wilson_interval(int(sum(found)), len(found), seeds=[seed, ci]))
        counts.append(used)
    sp = None
    if len(c_grid) >= 4:
        sp = spearman_monotone([float(c) for c in c_grid], [f.estimate for f in fractions], permutations, seed)
    else:
        flags.append("spearman-skipped")
    return PhaseScanReport(tuple(float(c) for c in c_grid), tuple(fractions), tuple(counts), sp, tuple(flags))


def fraction_gap_z(a: EstimatorReport, b: EstimatorReport) -> float:
    """(a - b) over the standard error of the difference of two proportions."""
    var = a.estimate * (1 - a.estimate) / a.n + b.estimate * (1 - b.estimate) / b.n
    return float("inf") if var == 0 else (a.estimate - b.estimate) / float(np.sqrt(var))
