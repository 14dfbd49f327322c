# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: IC cascade simulation and coverage union counting.

Mirrors ``_fallback.py`` draw-for-draw; keep the two in sync.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t SIM_STRIDE = 0xD1B54A32D192ED03ULL
cdef double TWO53 = 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef Py_ssize_t _cascade(const int64_t[::1] indptr, const int64_t[::1] indices,
                         const int64_t[::1] seeds, double threshold,
                         uint64_t state, uint8_t* active,
                         int64_t* queue) noexcept nogil:
    # queue doubles as the touched list: [0, head) processed, [head, tail) frontier
    cdef Py_ssize_t head = 0, tail = 0, level_end, i, k
    cdef int64_t u, v
    for i in range(seeds.shape[0]):
        u = seeds[i]
        if not active[u]:
            active[u] = 1
            queue[tail] = u
            tail += 1
    while head < tail:
        level_end = tail
        while head < level_end:
            u = queue[head]
            head += 1
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if active[v]:
                    continue
                state = state + GOLDEN
                if <double>(mix64(state) >> 11) < threshold:
                    active[v] = 1
                    queue[tail] = v
                    tail += 1
    return tail


def ic_spread(const int64_t[::1] indptr, const int64_t[::1] indices,
              const int64_t[::1] seeds, double p, Py_ssize_t n_sims,
              uint64_t eval_seed):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t sim, j, touched
    cdef long long total = 0
    cdef double threshold = p * TWO53
    cdef uint8_t* active = <uint8_t*> malloc(max(n, 1) * sizeof(uint8_t))
    cdef int64_t* queue = <int64_t*> malloc(max(n, 1) * sizeof(int64_t))
    if active == NULL or queue == NULL:
        free(active)
        free(queue)
        raise MemoryError()
    with nogil:
        for j in range(n):
            active[j] = 0
        for sim in range(n_sims):
            touched = _cascade(indptr, indices, seeds, threshold,
                               mix64(eval_seed + <uint64_t>(sim + 1) * SIM_STRIDE),
                               active, queue)
            total += touched
            for j in range(touched):
                active[queue[j]] = 0
    free(active)
    free(queue)
    return total


def ic_cascade(const int64_t[::1] indptr, const int64_t[::1] indices,
               const int64_t[::1] seeds, double p, uint64_t eval_seed,
               Py_ssize_t sim_index):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[::1] active = out
    cdef int64_t* queue = <int64_t*> malloc(max(n, 1) * sizeof(int64_t))
    if queue == NULL:
        raise MemoryError()
    if n > 0:
        _cascade(indptr, indices, seeds, p * TWO53,
                 mix64(eval_seed + <uint64_t>(sim_index + 1) * SIM_STRIDE),
                 &active[0], queue)
    free(queue)
    return out.astype(bool)


def coverage_count(const int64_t[::1] indptr, const int64_t[::1] indices,
                   const uint8_t[::1] bits, Py_ssize_t universe_size):
    cdef Py_ssize_t i, k, count = 0
    cdef int64_t e
    cdef uint8_t* covered = <uint8_t*> malloc(max(universe_size, 1))
    if covered == NULL:
        raise MemoryError()
    with nogil:
        for i in range(universe_size):
            covered[i] = 0
        for i in range(bits.shape[0]):
            if bits[i]:
                for k in range(indptr[i], indptr[i + 1]):
                    e = indices[k]
                    if not covered[e]:
                        covered[e] = 1
                        count += 1
    free(covered)
    return count
