"""Ordered replica-parallel map.

The worker count comes from ``LOOPSOUP_WORKERS`` (default 1).  Every task
carries its own keyed seed, so results never depend on the worker count.
"""

from __future__ import annotations

import os


def workers() -> int:
    try:
        return max(1, int(os.environ.get("LOOPSOUP_WORKERS", "1")))
    except ValueError:
        return 1


def ordered_map(fn, items, n_jobs: int | None = None) -> list:
    items = list(items)
    n_jobs = workers() if n_jobs is None else n_jobs
    if n_jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    from joblib import Parallel, delayed

    return Parallel(n_jobs=n_jobs)(delayed(fn)(it) for it in items)


def chunks(n: int, size: int) -> list[tuple[int, int]]:
    return [(i, min(n, i + size)) for i in range(0, n, size)]
