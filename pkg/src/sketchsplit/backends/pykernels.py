"""Pure-Python fallback for the compiled kernels.

Bit-identical to ``_kernels``: same hash family, same counter values, same
reservoir decisions.  Only the speed differs, so it is the backend of last
resort (selected when the extension is unavailable or when
``SKETCHSPLIT_BACKEND=python`` is set).
"""

from __future__ import annotations

import numpy as np

from ..hashing import GOLDEN, MASK64, mix64

name = "python"


class CounterStore:
    """Sparse counters for a dyadic Count-Min sketch.

    A cell is (level, row, bucket), flattened to
    ``(level * rows + row) * width + bucket`` and kept in a dict; absent
    keys read as zero, which is exactly a dense zero-initialized table.
    """

    def __init__(self, levels, rows, width, hash_a, hash_b):
        self.levels = int(levels)
        self.rows = int(rows)
        self.width = int(width)
        self._a = np.ascontiguousarray(hash_a, dtype=np.uint64)
        self._b = np.ascontiguousarray(hash_b, dtype=np.uint64)
        # Python-int copies for the scalar query path.
        self._ai = [[int(v) for v in row] for row in self._a]
        self._bi = [[int(v) for v in row] for row in self._b]
        self._cells: dict[int, int] = {}

    @property
    def nnz(self) -> int:
        return len(self._cells)

    def batch_update(self, xs, ws) -> None:
        """Add weights ``ws`` at feature values ``xs`` (sorted ascending)."""
        if len(xs) == 0:
            return
        width = np.uint64(self.width)
        rows = self.rows
        cells = self._cells
        blocks0 = (np.asarray(xs, dtype=np.int64) - 1).astype(np.uint64)
        weights = np.asarray(ws, dtype=np.int64)
        for level in range(self.levels):
            blk = blocks0 >> np.uint64(level)
            starts = np.concatenate(
                ([0], np.flatnonzero(blk[1:] != blk[:-1]) + 1)
            )
            ub = blk[starts]
            uw = np.add.reduceat(weights, starts).tolist()
            for row in range(rows):
                base = (level * rows + row) * self.width
                buckets = ((self._a[level, row] * ub + self._b[level, row]) % width).tolist()
                for bucket, w in zip(buckets, uw):
                    key = base + bucket
                    cells[key] = cells.get(key, 0) + w

    def block_min(self, level: int, block: int) -> int:
        """Min over rows of the counters this block hashes to."""
        cells = self._cells
        ai = self._ai[level]
        bi = self._bi[level]
        width = self.width
        base0 = level * self.rows * width
        best = None
        for row in range(self.rows):
            bucket = ((ai[row] * block + bi[row]) & MASK64) % width
            v = cells.get(base0 + row * width + bucket, 0)
            if v == 0:
                return 0
            if best is None or v < best:
                best = v
        return best

    def range_estimate(self, levels_arr, blocks_arr) -> int:
        total = 0
        for level, block in zip(levels_arr, blocks_arr):
            total += self.block_min(int(level), int(block))
        return total

    def items(self):
        """Nonzero cells as (keys, values) uint64 arrays, sorted by key."""
        if not self._cells:
            e = np.empty(0, dtype=np.uint64)
            return e, e.copy()
        keys = np.fromiter(self._cells.keys(), dtype=np.uint64, count=len(self._cells))
        vals = np.fromiter(self._cells.values(), dtype=np.uint64, count=len(self._cells))
        order = np.argsort(keys, kind="stable")
        return keys[order], vals[order]

    def load_items(self, keys, vals) -> None:
        cells = self._cells
        for key, val in zip(np.asarray(keys).tolist(), np.asarray(vals).tolist()):
            cells[key] = cells.get(key, 0) + val


def reservoir_offer(items, count_seen, cap, seed, xs):
    """Run the size-``cap`` uniform replacement rule over ``xs``.

    ``items`` is an int64 array of length ``cap`` mutated in place; returns
    the updated element count.
    """
    t = int(count_seen)
    cap = int(cap)
    seed = int(seed)
    for x in np.asarray(xs).tolist():
        t += 1
        if t <= cap:
            items[t - 1] = x
        else:
            r = mix64((seed + t * GOLDEN) & MASK64) % t
            if r < cap:
                items[r] = x
    return t
