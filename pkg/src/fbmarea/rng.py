"""Counter-based Gaussian draws.

Every value is addressed by (seed, stream, position): the Philox key is built
from the seed and the stream id, and the counter is positioned directly, so
any block can be regenerated without replaying earlier draws.  Normals come
from the inverse CDF of 53-bit uniforms, one 64-bit word per normal, which
keeps positions deterministic (no rejection sampling).
"""
from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_MASK = (1 << 64) - 1


def stream_id(*parts: int) -> int:
    """Pack small non-negative integers into one 64-bit stream id."""
    out = 0
    for p in parts:
        if p < 0 or p >= 1 << 16:
            raise ValueError("stream component out of range")
        out = (out << 16) | int(p)
    return out & _MASK


def normals(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """Standard normals at positions start .. start+count-1 of a stream."""
    if start < 0 or count < 0:
        raise ValueError("negative position")
    first = start // 4
    skip = start - 4 * first
    bg = np.random.Philox(key=np.array([seed & _MASK, stream], dtype=np.uint64),
                          counter=np.array([first, 0, 0, 0], dtype=np.uint64))
    raw = bg.random_raw(count + skip)[skip:]
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53
    return ndtri(u)
