"""Compiled random-walk kernels for excursion ensembles.

Randomness comes from splitmix64, which is a hash of a counter; each
replica's counter is seeded from its own keyed stream, so results do not
depend on how replicas are scheduled.
"""

from __future__ import annotations

import numpy as np
from numba import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
M1 = np.uint64(0xBF58476D1CE4E5B9)
M2 = np.uint64(0x94D049BB133111EB)

# end codes
RETURNED = 0  # came back to the bottom row y = 0
ESCAPED = 1  # left the box through a side or the top
TRUNCATED = 2  # hit the step cap

DX = np.array([1, 0, -1, 0], dtype=np.int64)
DY = np.array([0, 1, 0, -1], dtype=np.int64)


@njit(cache=True)
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * M1
    z = (z ^ (z >> np.uint64(27))) * M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def excursion_hits(starts, offsets, seeds, width, height, hull_cx, hull_cy, hull_r2, max_steps):
    """Run one excursion per start and report hull hits and the end point.

    Each walk starts at (x, 0), steps to (x, 1) and continues until it is
    back on y = 0 or leaves |x| <= width, y <= height.  Replica r owns starts
    ``offsets[r]:offsets[r+1]`` and consumes the stream seeded by ``seeds[r]``.
    """
    n = starts.shape[0]
    nh = hull_cx.shape[0]
    end_x = np.empty(n, dtype=np.int64)
    code = np.empty(n, dtype=np.int8)
    hits = np.zeros((n, nh), dtype=np.bool_)
    for r in range(offsets.shape[0] - 1):
        state = seeds[r]
        bits = np.uint64(0)
        left = 0
        for j in range(offsets[r], offsets[r + 1]):
            x = starts[j]
            y = 1
            steps = 0
            while True:
                for h in range(nh):
                    dx = x - hull_cx[h]
                    dy = y - hull_cy[h]
                    if dx * dx + dy * dy < hull_r2[h]:
                        hits[j, h] = True
                if y == 0:
                    code[j] = RETURNED
                    break
                if x > width or x < -width or y > height:
                    code[j] = ESCAPED
                    break
                if steps >= max_steps:
                    code[j] = TRUNCATED
                    break
                if left == 0:
                    state += GOLDEN
                    bits = _mix(state)
                    left = 32
                d = bits & np.uint64(3)
                bits >>= np.uint64(2)
                left -= 1
                x += DX[d]
                y += DY[d]
                steps += 1
            end_x[j] = x
    return end_x, code, hits


@njit(cache=True)
def excursion_paths(starts, seed, width, height, max_steps):
    """Full site sequences of excursions from ``starts`` sharing one stream.

    Returns flat coordinates, per-path offsets, and end codes.  The recorded
    path is (x, 0), (x, 1), ..., end site.
    """
    n = starts.shape[0]
    cap = 1024
    xs = np.empty(cap, dtype=np.int64)
    ys = np.empty(cap, dtype=np.int64)
    offsets = np.empty(n + 1, dtype=np.int64)
    code = np.empty(n, dtype=np.int8)
    used = 0
    state = seed
    bits = np.uint64(0)
    left = 0
    for j in range(n):
        offsets[j] = used
        x = starts[j]
        y = 0
        steps = 0
        first = True
        while True:
            if used + 1 > cap:
                cap *= 2
                nx = np.empty(cap, dtype=np.int64)
                ny = np.empty(cap, dtype=np.int64)
                nx[:used] = xs[:used]
                ny[:used] = ys[:used]
                xs = nx
                ys = ny
            xs[used] = x
            ys[used] = y
            used += 1
            if first:
                y = 1
                first = False
                continue
            if y == 0:
                code[j] = RETURNED
                break
            if x > width or x < -width or y > height:
                code[j] = ESCAPED
                break
            if steps >= max_steps:
                code[j] = TRUNCATED
                break
            if left == 0:
                state += GOLDEN
                bits = _mix(state)
                left = 32
            d = bits & np.uint64(3)
            bits >>= np.uint64(2)
            left -= 1
            x += DX[d]
            y += DY[d]
            steps += 1
    offsets[n] = used
    return xs[:used], ys[:used], offsets, code


@njit(cache=True)
def _uniform(state):
    state += GOLDEN
    return state, (_mix(state) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def _poisson_small(state, lam):
    u = 0.0
    state, u = _uniform(state)
    k = 0
    p = np.exp(-lam)
    cdf = p
    while u > cdf and p > 0.0:
        k += 1
        p *= lam / k
        cdf += p
    return state, k


@njit(cache=True)
def _poisson(state, lam):
    # inversion on pieces of at most 64 keeps exp(-lam) well away from underflow
    total = 0
    while lam > 0.0:
        piece = min(lam, 64.0)
        state, k = _poisson_small(state, piece)
        total += k
        lam -= piece
    return state, total


@njit(cache=True)
def avoidance_bits(seeds, width, height, lam, arc_lo, arc_hi, bits, max_steps, require_return):
    """Per-replica union of hull bits met by excursions.

    Every arc site (x, 0), arc_lo <= x <= arc_hi, emits Poisson(lam)
    excursions.  ``bits[x + width, y]`` holds one bit per hull.  With
    ``require_return`` an excursion contributes its bits only if it comes back
    to y = 0 inside the arc.
    Returns the per-replica bits and the per-replica excursion count.
    """
    nrep = seeds.shape[0]
    out = np.zeros(nrep, dtype=np.uint8)
    counts = np.zeros(nrep, dtype=np.int64)
    for r in range(nrep):
        state = seeds[r]
        acc = np.uint8(0)
        total = 0
        for x0 in range(arc_lo, arc_hi + 1):
            state, k = _poisson(state, lam)
            total += k
            for _ in range(k):
                x = x0
                y = 1
                seen = bits[x + width, y]
                steps = 0
                left = 0
                word = np.uint64(0)
                while True:
                    if left == 0:
                        state += GOLDEN
                        word = _mix(state)
                        left = 32
                    d = word & np.uint64(3)
                    word >>= np.uint64(2)
                    left -= 1
                    x += DX[d]
                    y += DY[d]
                    steps += 1
                    if y == 0:
                        if not require_return or arc_lo <= x <= arc_hi:
                            acc |= seen
                        break
                    if x > width or x < -width or y > height or steps >= max_steps:
                        if not require_return:
                            acc |= seen
                        break
                    seen |= bits[x + width, y]
        out[r] = acc
        counts[r] = total
    return out, counts
