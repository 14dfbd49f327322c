"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Both implementations consume the same SplitMix64 counter stream in the same
order, so they return bit-identical results for identical inputs.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
SIM_STRIDE = 0xD1B54A32D192ED03
TWO53 = float(1 << 53)


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def sim_state(eval_seed, sim_index):
    return mix64((eval_seed + (sim_index + 1) * SIM_STRIDE) & MASK64)


def _cascade(indptr, indices, seeds, threshold, state, active):
    # active is a scratch list of bools, reset by the caller through `touched`
    touched = []
    for s in seeds:
        if not active[s]:
            active[s] = True
            touched.append(s)
    frontier = list(touched)
    while frontier:
        nxt = []
        for u in frontier:
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if active[v]:
                    continue
                state = (state + GOLDEN) & MASK64
                if (mix64(state) >> 11) < threshold:
                    active[v] = True
                    touched.append(v)
                    nxt.append(v)
        frontier = nxt
    return touched


def ic_spread(indptr, indices, seeds, p, n_sims, eval_seed):
    """Total number of activated vertices summed over ``n_sims`` cascades."""
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    seeds = [int(x) for x in seeds]
    n = len(indptr) - 1
    threshold = float(p) * TWO53
    eval_seed = int(eval_seed) & MASK64
    active = [False] * n
    total = 0
    for sim in range(n_sims):
        touched = _cascade(indptr, indices, seeds, threshold,
                           sim_state(eval_seed, sim), active)
        total += len(touched)
        for v in touched:
            active[v] = False
    return total


def ic_cascade(indptr, indices, seeds, p, eval_seed, sim_index):
    n = len(indptr) - 1
    active = [False] * n
    _cascade([int(x) for x in indptr], [int(x) for x in indices],
             [int(x) for x in seeds], float(p) * TWO53,
             sim_state(int(eval_seed) & MASK64, sim_index), active)
    return np.array(active, dtype=bool)


def coverage_count(indptr, indices, bits, universe_size):
    chosen = np.flatnonzero(bits)
    if chosen.size == 0:
        return 0
    covered = np.zeros(universe_size, dtype=bool)
    for i in chosen:
        covered[indices[indptr[i]:indptr[i + 1]]] = True
    return int(np.count_nonzero(covered))
