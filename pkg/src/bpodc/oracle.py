"""Exhaustive ground truth for small instances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .problems import CoverageProblem, ICModel, LinearCost, _seed_indices

MAX_ITEMS = 24
MAX_EDGES = 20
MAX_RATIO_ITEMS = 12


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    opt_value: float
    opt_subset: np.ndarray
    enumerated_count: int


def _mask_bits(masks: np.ndarray, n: int) -> np.ndarray:
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def brute_force_opt(problem, budget: float, chunk: int = 1 << 16) -> OracleResult:
    """Best feasible subset by scanning all ``2**n`` subsets of the noise-free objective."""
    n = problem.n
    if n > MAX_ITEMS:
        raise InstanceTooLarge(f"n={n} exceeds the enumeration bound {MAX_ITEMS}")
    costs = problem.costs.item_costs
    best = (-np.inf, np.inf, 0)  # (value, cost, mask)
    if isinstance(problem, CoverageProblem):
        inst = problem.instance
        owners = np.zeros(inst.universe_size, dtype=np.int64)
        for i, s in enumerate(inst.sets):
            owners[s] |= 1 << i
    for start in range(0, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        bits = _mask_bits(masks, n)
        c = bits.astype(float) @ costs
        ok = c <= budget
        if not ok.any():
            continue
        masks, bits, c = masks[ok], bits[ok], c[ok]
        if isinstance(problem, CoverageProblem):
            vals = ((masks[:, None] & owners[None, :]) != 0).sum(axis=1).astype(float)
        else:
            vals = np.array([problem.exact_value(b) for b in bits], dtype=float)
        # highest value, then lowest cost, then lowest mask
        order = np.lexsort((masks, c, -vals))
        j = order[0]
        cand = (vals[j], c[j], int(masks[j]))
        if cand[0] > best[0] or (cand[0] == best[0] and cand[1] < best[1]):
            best = cand
    subset = _mask_bits(np.array([best[2]], dtype=np.int64), n)[0]
    return OracleResult(float(best[0]), subset, 1 << n)


def exact_ic_expectation(model: ICModel, seeds) -> float:
    """Expected cascade size by enumerating every live-edge pattern."""
    g = model.graph
    m = g.n_edges
    if m > MAX_EDGES:
        raise InstanceTooLarge(f"{m} edges exceed the enumeration bound {MAX_EDGES}")
    seed_idx = _seed_indices(seeds)
    if seed_idx.size == 0:
        return 0.0
    p = model.edge_probability
    # relabel edge endpoints so reach sets fit in one uint64 mask
    local = {int(v): i for i, v in enumerate(np.unique(g.edges))}
    seeds_on_edges = [local[int(s)] for s in seed_idx if int(s) in local]
    isolated_seeds = seed_idx.size - len(seeds_on_edges)
    if m == 0:
        return float(seed_idx.size)
    patterns = np.arange(1 << m, dtype=np.uint64)
    start = np.uint64(sum(1 << s for s in seeds_on_edges))
    reach = np.full(patterns.shape, start, dtype=np.uint64)
    arcs = [(np.uint64(local[int(u)]), np.uint64(local[int(v)])) for u, v in g.edges]
    one = np.uint64(1)
    while True:
        before = reach.copy()
        for j, (u, v) in enumerate(arcs):
            live = (patterns >> np.uint64(j)) & one
            reach |= (((reach >> u) & one) & live) << v
        if np.array_equal(before, reach):
            break
    sizes = np.zeros(patterns.shape, dtype=np.int64)
    live_count = np.zeros(patterns.shape, dtype=np.int64)
    for i in range(len(local)):
        sizes += ((reach >> np.uint64(i)) & one).astype(np.int64)
    for j in range(m):
        live_count += ((patterns >> np.uint64(j)) & one).astype(np.int64)
    probs = p ** live_count * (1.0 - p) ** (m - live_count)
    return float(np.sum(sizes * probs)) + isolated_seeds


def _as_set_function(f) -> Callable[[np.ndarray], float]:
    if hasattr(f, "exact_value"):
        return f.exact_value
    return f


def exact_submodularity_ratio(f, n: int) -> float:
    """Minimum of marginal(X, v) / marginal(Y, v) over X within Y and v outside Y."""
    if n > MAX_RATIO_ITEMS:
        raise InstanceTooLarge(f"n={n} exceeds the ratio enumeration bound {MAX_RATIO_ITEMS}")
    fn = _as_set_function(f)
    masks = np.arange(1 << n, dtype=np.int64)
    table = np.array([fn(b) for b in _mask_bits(masks, n)], dtype=float)
    ratio = np.inf
    for v in range(n):
        bit = 1 << v
        without = masks[(masks & bit) == 0]
        marg = np.full(1 << n, np.inf)
        marg[without] = table[without | bit] - table[without]
        # subset-minimum transform: low[Y] = min over X within Y of marg[X]
        low = marg.copy()
        for b in range(n):
            if b == v:
                continue
            view = low.reshape(-1, 2, 1 << b)
            np.minimum(view[:, 1, :], view[:, 0, :], out=view[:, 1, :])
        denom = marg[without]
        pos = denom > 0
        if pos.any():
            ratio = min(ratio, float(np.min(low[without][pos] / denom[pos])))
    if not np.isfinite(ratio):
        return 1.0
    return min(max(ratio, 0.0), 1.0)


def min_marginal_cost(cost: LinearCost) -> float:
    return cost.min_cost


def total_curvature(cost) -> float:
    """``1 - min_v (c(V) - c(V - v)) / c({v})`` over items with positive singleton cost."""
    n = cost.n
    full = np.ones(n, dtype=bool)
    c_full = cost(full)
    ratios = []
    for v in range(n):
        single = np.zeros(n, dtype=bool)
        single[v] = True
        c_v = cost(single)
        if c_v > 0:
            rest = full.copy()
            rest[v] = False
            ratios.append((c_full - cost(rest)) / c_v)
    return 1.0 - min(ratios)


def max_feasible_size(cost: LinearCost, budget: float) -> int:
    """Largest cardinality of a subset whose cost stays within ``budget``."""
    cum = np.cumsum(np.sort(cost.item_costs))
    return int(np.searchsorted(cum, budget, side="right"))


def reduced_budget(budget: float, alpha_c: float, alpha_chat: float, kappa_c: float,
                   psi: float, k_b: int) -> float:
    return budget * alpha_chat * (1 + alpha_c ** 2 * (k_b - 1) * (1 - kappa_c)) / (psi * k_b)
