"""Counter-based random streams.

Every random draw in the package comes from a Philox generator whose key is
derived from ``(seed, *key)`` through :class:`numpy.random.SeedSequence`
spawn keys, so a stream depends only on what it is for and never on the
order in which work is scheduled.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

# stream purposes; appended to spawn keys so that distinct uses never collide
COUNTS = 1
LENGTH = 2
BRIDGE = 3
REPLICA = 4
EXCURSION = 5
PERMUTATION = 6
SINGLE_LOOP = 7


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *key: int) -> int:
    """A 64-bit child seed for the stream ``(seed, *key)``."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def seed_hash(seeds) -> str:
    blob = json.dumps(sorted(int(s) for s in seeds)).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
