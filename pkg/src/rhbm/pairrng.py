"""Counter-based uniforms keyed by ``(seed, i, j)``.

Philox4x32-10 (Salmon et al., Random123) with the 64-bit seed as key and the
node pair as counter. Every unordered pair gets its own uniform, independent of
evaluation order, so any pair scan (row chunks, block pairs, parallel workers)
reproduces the same graph.
"""

from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK = np.uint64(0xFFFFFFFF)
_SHIFT = np.uint64(32)


def philox4x32(counter, key, rounds: int = 10):
    """Vectorized Philox4x32 block function.

    ``counter`` is a sequence of four uint32-valued arrays (broadcastable),
    ``key`` a pair of python ints. Returns four uint64 arrays holding 32-bit
    words.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) & _MASK for c in counter)
    k0, k1 = int(key[0]) & 0xFFFFFFFF, int(key[1]) & 0xFFFFFFFF
    for _ in range(rounds):
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0, lo0 = p0 >> _SHIFT, p0 & _MASK
        hi1, lo1 = p1 >> _SHIFT, p1 & _MASK
        c0, c1, c2, c3 = hi1 ^ c1 ^ np.uint64(k0), lo1, hi0 ^ c3 ^ np.uint64(k1), lo0
        k0 = (k0 + _W0) & 0xFFFFFFFF
        k1 = (k1 + _W1) & 0xFFFFFFFF
    return c0, c1, c2, c3


def seed_key(seed: int) -> tuple[int, int]:
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    return seed & 0xFFFFFFFF, seed >> 32


def pair_uniforms(seed: int, i, j, stream: int = 0) -> np.ndarray:
    """Uniform doubles in [0, 1) for node pairs, symmetric in ``(i, j)``.

    ``stream`` separates independent uses of the same seed.
    """
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    lo = np.minimum(i, j)
    hi = np.maximum(i, j)
    x0, x1, _, _ = philox4x32((lo, hi, np.uint64(stream), np.uint64(0)), seed_key(seed))
    # 53-bit mantissa from two 32-bit words
    bits = (x0 << np.uint64(21)) ^ (x1 >> np.uint64(11))
    return (bits & np.uint64((1 << 53) - 1)).astype(np.float64) * (1.0 / (1 << 53))
