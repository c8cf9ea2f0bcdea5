"""Counter-based uniform variates keyed by (seed, *integer fields).

Each variate is a pure function of its key, so values do not depend on
evaluation order, chunking or thread count.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def hash64(seed: int, *fields) -> np.ndarray:
    """Hash broadcastable integer arrays to uint64."""
    with np.errstate(over="ignore"):
        h = _mix(np.asarray(seed & 0xFFFFFFFFFFFFFFFF, dtype=np.uint64) + _GOLDEN)
        for i, f in enumerate(fields):
            f = np.asarray(f).astype(np.int64).view(np.uint64) if np.ndim(f) else np.uint64(int(f) & 0xFFFFFFFFFFFFFFFF)
            h = _mix(h ^ (f + _GOLDEN * np.uint64(i + 2)))
    return h


def uniform(seed: int, *fields) -> np.ndarray:
    """Uniform doubles in [0, 1) from the top 53 bits of the key hash."""
    return (hash64(seed, *fields) >> np.uint64(11)).astype(np.float64) * 2.0**-53
