"""Deterministic 64-bit mixing shared by every randomized component.

Both the compiled kernels and the pure-Python fallback evaluate the exact
same integer recurrences defined here, so a given seed produces
bit-identical sketches and reservoirs regardless of which backend is
active.  All arithmetic is modulo 2**64.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

# Seed-derivation domains, so structures sharing one user seed stay decorrelated.
DOMAIN_SKETCH = 1
DOMAIN_RESERVOIR = 2


def mix64(z: int) -> int:
    """splitmix64 finalizer: an avalanching bijection on 64-bit ints."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *parts: int) -> int:
    """Fold integer tags into ``seed``, one mix per tag."""
    h = seed & MASK64
    for p in parts:
        h = mix64((h + GOLDEN + (p & MASK64)) & MASK64)
    return h


def stream_rand(seed: int, t: int) -> int:
    """t-th draw of the counter-based random stream for ``seed``."""
    return mix64((seed + t * GOLDEN) & MASK64)


def hash_coefficients(seed: int, sketch_id: int, levels: int, rows: int):
    """Multiply-shift coefficients for every (level, row) hash.

    Returns uint64 arrays ``a`` (forced odd) and ``b``, both of shape
    (levels, rows).  Bucket of a dyadic block index ``blk`` in a row of
    width ``w`` is ``((a * blk + b) mod 2**64) mod w``.
    """
    a = np.empty((levels, rows), dtype=np.uint64)
    b = np.empty((levels, rows), dtype=np.uint64)
    base = derive_seed(seed, DOMAIN_SKETCH, sketch_id)
    for lvl in range(levels):
        for row in range(rows):
            a[lvl, row] = derive_seed(base, lvl, row, 0) | 1
            b[lvl, row] = derive_seed(base, lvl, row, 1)
    return a, b
