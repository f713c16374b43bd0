"""Confidence intervals and the goodness-of-fit / monotonicity tests used by
the experiments.

"Within 3σ" everywhere means ``|z| < 3`` under the variance method named in
the report.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats as sps

from ._rng import PERMUTATION, seed_hash, stream


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class EstimatorReport:
    estimate: float
    ci_low: float
    ci_high: float
    n: int
    method: str
    seeds: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (self.ci_low <= self.estimate <= self.ci_high):
            raise ValueError("estimate outside its interval")

    @property
    def halfwidth(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GofReport:
    statistic: float
    dof: int
    p_value: float
    binning: str = ""
    flags: tuple = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["flags"] = list(self.flags)
        return d


def _z(level: float) -> float:
    return float(sps.norm.ppf(0.5 + level / 2))


def wilson_interval(successes: int, n: int, level: float = 0.95, seeds=()) -> EstimatorReport:
    if n < 1 or not 0 <= successes <= n:
        raise ValueError(f"need 0 <= successes <= n and n >= 1, got {successes}/{n}")
    z = _z(level)
    p = successes / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # clamp tiny rounding excursions so that lo <= p <= hi holds exactly
    lo = min(max(0.0, centre - half), p)
    hi = max(min(1.0, centre + half), p)
    return EstimatorReport(p, lo, hi, n, "wilson", seed_hash(seeds) if seeds else "")


def normal_interval(values, level: float = 0.95, seeds=()) -> EstimatorReport:
    """Mean with a normal-approximation interval from the sample variance."""
    v = np.asarray(values, dtype=float)
    n = len(v)
    m = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    z = _z(level)
    return EstimatorReport(m, m - z * se, m + z * se, n, "normal", seed_hash(seeds) if seeds else "")


def poisson_gof(counts, mean: float) -> GofReport:
    """Chi-square of integer counts against Poisson(mean).

    Bins are built left to right and closed once their expected count reaches
    5; the final bin absorbs the infinite upper tail and, if still short, is
    merged into its left neighbour.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if mean <= 0:
        raise ValueError("mean must be positive")
    if np.any(counts < 0):
        raise ValueError("counts must be nonnegative")
    n = len(counts)
    kmax = int(max(counts.max(initial=0), sps.poisson.ppf(1 - 1e-12, mean))) + 1
    expected = n * sps.poisson.pmf(np.arange(kmax + 1), mean)
    observed = np.bincount(np.minimum(counts, kmax), minlength=kmax + 1).astype(float)

    edges = [0]  # bin i covers [edges[i], edges[i+1])
    acc = 0.0
    for k in range(kmax + 1):
        acc += expected[k]
        if acc >= 5:
            edges.append(k + 1)
            acc = 0.0
    if edges[-1] <= kmax:
        edges.append(kmax + 1)
    if len(edges) > 2:
        # last bin holds the tail P(X >= lower edge)
        lo = edges[-2]
        tail = n * sps.poisson.sf(lo - 1, mean)
        if tail < 5:
            edges.pop(-2)
    nbins = len(edges) - 1
    if nbins < 2:
        raise InsufficientData("fewer than two bins with expected count >= 5")
    exp_b = np.empty(nbins)
    obs_b = np.empty(nbins)
    for i in range(nbins):
        a, b = edges[i], edges[i + 1]
        obs_b[i] = observed[a:b].sum()
        exp_b[i] = n * (sps.poisson.sf(a - 1, mean) if i == nbins - 1 else sps.poisson.cdf(b - 1, mean) - sps.poisson.cdf(a - 1, mean))
    stat = float(((obs_b - exp_b) ** 2 / exp_b).sum())
    dof = nbins - 1
    p = float(sps.chi2.sf(stat, dof))
    desc = ",".join(f"[{edges[i]},{edges[i + 1]})" for i in range(nbins - 1)) + f",[{edges[-2]},inf)"
    return GofReport(stat, dof, p, desc)


def chi_square_uniform(observed) -> GofReport:
    observed = np.asarray(observed, dtype=float)
    res = sps.chisquare(observed)
    return GofReport(float(res.statistic), len(observed) - 1, float(res.pvalue), f"{len(observed)} equiprobable cells")


def _rank_corr(xr: np.ndarray, yr: np.ndarray) -> float:
    xc = xr - xr.mean()
    yc = yr - yr.mean()
    den = math.sqrt(float((xc * xc).sum() * (yc * yc).sum()))
    if den == 0:
        return 0.0
    return float((xc * yc).sum() / den)


def spearman_monotone(xs, ys, permutations: int = 10_000, seed: int = 0) -> GofReport:
    """Spearman rho with a one-sided permutation p-value for a decreasing trend.

    Ties get average ranks; a constant input has rho = 0.  When n! does not
    exceed ``permutations`` the null distribution is enumerated exactly,
    otherwise it is sampled and p = (k + 1) / (permutations + 1).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    n = len(xs)
    if n < 4 or len(ys) != n:
        raise InsufficientData("need at least 4 paired points")
    xr = sps.rankdata(xs)
    yr = sps.rankdata(ys)
    rho = _rank_corr(xr, yr)
    tol = 1e-12
    if math.factorial(n) <= permutations:
        hits = total = 0
        for perm in itertools.permutations(range(n)):
            total += 1
            if _rank_corr(xr, yr[list(perm)]) <= rho + tol:
                hits += 1
        p = hits / total
        how = f"exact over {total} permutations"
    else:
        rng = stream(seed, PERMUTATION)
        perms = rng.permuted(np.tile(yr, (permutations, 1)), axis=1)
        pc = perms - perms.mean(axis=1, keepdims=True)
        xc = xr - xr.mean()
        den = np.sqrt((xc * xc).sum() * (pc * pc).sum(axis=1))
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.where(den > 0, (pc @ xc) / np.where(den > 0, den, 1), 0.0)
        hits = int((r <= rho + tol).sum())
        p = (hits + 1) / (permutations + 1)
        how = f"{permutations} random permutations"
    return GofReport(rho, n - 2, float(p), how)


def independence_corr(xs, ys) -> GofReport:
    """Pearson correlation with a two-sided Fisher-z p-value."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    n = len(xs)
    if n < 30:
        raise InsufficientData("need at least 30 pairs")
    if xs.std() == 0 or ys.std() == 0:
        return GofReport(0.0, n - 2, 1.0, "pearson/fisher-z", ("zero-variance",))
    r = float(np.corrcoef(xs, ys)[0, 1])
    r = max(min(r, 1.0), -1.0)
    if abs(r) >= 1.0:
        return GofReport(r, n - 2, 0.0, "pearson/fisher-z")
    z = math.atanh(r) * math.sqrt(n - 3)
    return GofReport(r, n - 2, float(2 * sps.norm.sf(abs(z))), "pearson/fisher-z")


def within_sigma(observed: float, expected: float, sigma: float, k: float = 3.0) -> bool:
    if sigma <= 0:
        return observed == expected
    return abs(observed - expected) < k * sigma
