# cython: language_level=3
"""Compiled kernels: sparse dyadic Count-Min counters and the reservoir loop.

Must stay bit-identical to ``pykernels``; both evaluate the integer
recurrences defined in ``sketchsplit.hashing``.
"""

import numpy as np

from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc

name = "cython"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t EMPTY = 0xFFFFFFFFFFFFFFFFULL


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef class CounterStore:
    """Open-addressing map from flat cell index to counter value.

    Flat index = (level * rows + row) * width + bucket; absent cells read
    as zero.  Keys stay below 2**63, so EMPTY never collides with a key.
    """

    cdef uint64_t* _keys
    cdef uint64_t* _vals
    cdef Py_ssize_t _cap
    cdef Py_ssize_t _size
    cdef uint64_t _mask
    cdef uint64_t _width
    cdef public int levels
    cdef public int rows
    cdef uint64_t[:, ::1] _a
    cdef uint64_t[:, ::1] _b

    def __cinit__(self, levels, rows, width, hash_a, hash_b):
        self.levels = levels
        self.rows = rows
        self._width = <uint64_t> width
        self._a = np.ascontiguousarray(hash_a, dtype=np.uint64)
        self._b = np.ascontiguousarray(hash_b, dtype=np.uint64)
        self._cap = 1 << 12
        self._mask = self._cap - 1
        self._size = 0
        self._keys = <uint64_t*> malloc(self._cap * sizeof(uint64_t))
        self._vals = <uint64_t*> malloc(self._cap * sizeof(uint64_t))
        if self._keys == NULL or self._vals == NULL:
            raise MemoryError()
        cdef Py_ssize_t i
        for i in range(self._cap):
            self._keys[i] = EMPTY

    def __dealloc__(self):
        if self._keys != NULL:
            free(self._keys)
        if self._vals != NULL:
            free(self._vals)

    @property
    def width(self):
        return self._width

    @property
    def nnz(self):
        return self._size

    cdef int _grow(self) except -1:
        cdef Py_ssize_t new_cap = self._cap * 2
        cdef uint64_t* nk = <uint64_t*> malloc(new_cap * sizeof(uint64_t))
        cdef uint64_t* nv = <uint64_t*> malloc(new_cap * sizeof(uint64_t))
        if nk == NULL or nv == NULL:
            free(nk)
            free(nv)
            raise MemoryError()
        cdef uint64_t new_mask = new_cap - 1
        cdef Py_ssize_t i, j
        for i in range(new_cap):
            nk[i] = EMPTY
        for i in range(self._cap):
            if self._keys[i] != EMPTY:
                j = <Py_ssize_t> (mix64(self._keys[i]) & new_mask)
                while nk[j] != EMPTY:
                    j = <Py_ssize_t> ((j + 1) & new_mask)
                nk[j] = self._keys[i]
                nv[j] = self._vals[i]
        free(self._keys)
        free(self._vals)
        self._keys = nk
        self._vals = nv
        self._cap = new_cap
        self._mask = new_mask
        return 0

    cdef int _add(self, uint64_t key, uint64_t w) except -1:
        if (self._size + 1) * 10 > self._cap * 7:
            self._grow()
        cdef Py_ssize_t i = <Py_ssize_t> (mix64(key) & self._mask)
        while True:
            if self._keys[i] == key:
                self._vals[i] += w
                return 0
            if self._keys[i] == EMPTY:
                self._keys[i] = key
                self._vals[i] = w
                self._size += 1
                return 0
            i = <Py_ssize_t> ((i + 1) & self._mask)

    cdef inline uint64_t _get(self, uint64_t key) nogil:
        cdef Py_ssize_t i = <Py_ssize_t> (mix64(key) & self._mask)
        while True:
            if self._keys[i] == key:
                return self._vals[i]
            if self._keys[i] == EMPTY:
                return 0
            i = <Py_ssize_t> ((i + 1) & self._mask)

    def batch_update(self, const int64_t[::1] xs, const int64_t[::1] ws):
        """Add weights ``ws`` at feature values ``xs`` (sorted ascending)."""
        cdef Py_ssize_t n = xs.shape[0]
        if n == 0:
            return
        cdef int level, row
        cdef Py_ssize_t i
        cdef uint64_t blk, run_blk, run_w, a, b, bucket, row_base
        cdef uint64_t width = self._width
        cdef uint64_t rows = <uint64_t> self.rows
        for level in range(self.levels):
            i = 0
            while i < n:
                run_blk = (<uint64_t> (xs[i] - 1)) >> level
                run_w = <uint64_t> ws[i]
                i += 1
                while i < n and ((<uint64_t> (xs[i] - 1)) >> level) == run_blk:
                    run_w += <uint64_t> ws[i]
                    i += 1
                row_base = (<uint64_t> level) * rows
                for row in range(self.rows):
                    a = self._a[level, row]
                    b = self._b[level, row]
                    bucket = (a * run_blk + b) % width
                    self._add((row_base + <uint64_t> row) * width + bucket, run_w)

    def block_min(self, int level, object block):
        """Min over rows of the counters this block hashes to."""
        cdef uint64_t blk = <uint64_t> block
        return self._block_min(level, blk)

    cdef uint64_t _block_min(self, int level, uint64_t blk) nogil:
        cdef uint64_t width = self._width
        cdef uint64_t rows = <uint64_t> self.rows
        cdef uint64_t row_base = (<uint64_t> level) * rows
        cdef uint64_t best = EMPTY
        cdef uint64_t bucket, v
        cdef int row
        for row in range(self.rows):
            bucket = (self._a[level, row] * blk + self._b[level, row]) % width
            v = self._get((row_base + <uint64_t> row) * width + bucket)
            if v == 0:
                return 0
            if v < best:
                best = v
        return best

    def range_estimate(self, const int64_t[::1] levels_arr, const int64_t[::1] blocks_arr):
        cdef uint64_t total = 0
        cdef Py_ssize_t i
        for i in range(levels_arr.shape[0]):
            total += self._block_min(<int> levels_arr[i], <uint64_t> blocks_arr[i])
        return total

    def items(self):
        """Nonzero cells as (keys, values) uint64 arrays, sorted by key."""
        keys_np = np.empty(self._size, dtype=np.uint64)
        vals_np = np.empty(self._size, dtype=np.uint64)
        cdef uint64_t[::1] kv = keys_np
        cdef uint64_t[::1] vv = vals_np
        cdef Py_ssize_t i, j = 0
        for i in range(self._cap):
            if self._keys[i] != EMPTY:
                kv[j] = self._keys[i]
                vv[j] = self._vals[i]
                j += 1
        order = np.argsort(keys_np, kind="stable")
        return keys_np[order], vals_np[order]

    def load_items(self, keys, vals):
        cdef uint64_t[::1] kv = np.ascontiguousarray(keys, dtype=np.uint64)
        cdef uint64_t[::1] vv = np.ascontiguousarray(vals, dtype=np.uint64)
        cdef Py_ssize_t i
        for i in range(kv.shape[0]):
            self._add(kv[i], vv[i])


def reservoir_offer(int64_t[::1] items, count_seen, cap, seed, const int64_t[::1] xs):
    """Run the size-``cap`` uniform replacement rule over ``xs``.

    ``items`` is mutated in place; returns the updated element count.
    """
    cdef uint64_t t = <uint64_t> count_seen
    cdef uint64_t capacity = <uint64_t> cap
    cdef uint64_t seed_base = <uint64_t> seed
    cdef uint64_t r
    cdef Py_ssize_t i, n = xs.shape[0]
    for i in range(n):
        t += 1
        if t <= capacity:
            items[<Py_ssize_t> (t - 1)] = xs[i]
        else:
            r = mix64(seed_base + t * GOLDEN) % t
            if r < capacity:
                items[<Py_ssize_t> r] = xs[i]
    return t
