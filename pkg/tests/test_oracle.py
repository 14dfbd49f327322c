import itertools

import numpy as np
import pytest

from bpodc.core import RngStream
from bpodc.oracle import (InstanceTooLarge, brute_force_opt, exact_ic_expectation,
                          exact_submodularity_ratio, max_feasible_size, min_marginal_cost,
                          reduced_budget, total_curvature)
from bpodc.problems import (CoverageInstance, CoverageProblem, FunctionProblem, Graph, ICModel,
                            LinearCost, random_digraph)


def enumerate_ic(n, arcs, p, seeds):
    """Cascade-size mean and variance by looping over live-edge patterns in plain Python."""
    m = len(arcs)
    mean = second = 0.0
    for pattern in itertools.product((0, 1), repeat=m):
        live = [a for a, on in zip(arcs, pattern) if on]
        k = sum(pattern)
        prob = p ** k * (1 - p) ** (m - k)
        seen, stack = set(seeds), list(seeds)
        while stack:
            u = stack.pop()
            for a, b in live:
                if a == u and b not in seen:
                    seen.add(b)
                    stack.append(b)
        mean += prob * len(seen)
        second += prob * len(seen) ** 2
    return mean, max(second - mean ** 2, 0.0)


def test_brute_force_toy(toy_coverage):
    res = brute_force_opt(toy_coverage, 2.0)
    assert res.opt_value == 3.0 and res.enumerated_count == 8
    assert res.opt_subset.tolist() == [True, True, False]
    assert brute_force_opt(toy_coverage, 3.0).opt_value == 4.0
    assert brute_force_opt(toy_coverage, 0.5).opt_value == 0.0


def test_brute_force_against_itertools():
    rng = np.random.default_rng(1)
    sets = tuple(rng.choice(15, size=4, replace=False) for _ in range(9))
    costs = rng.integers(1, 4, size=9).astype(float)
    prob = CoverageProblem(CoverageInstance(15, sets), costs)
    best = 0
    for r in range(10):
        for combo in itertools.combinations(range(9), r):
            if costs[list(combo)].sum() <= 7:
                best = max(best, len(set().union(*[set(sets[i].tolist()) for i in combo])))
    assert brute_force_opt(prob, 7.0).opt_value == best


def test_brute_force_too_large():
    prob = CoverageProblem(CoverageInstance(30, tuple([i] for i in range(30))), np.ones(30))
    with pytest.raises(InstanceTooLarge):
        brute_force_opt(prob, 3.0)


def test_exact_ic_chain():
    model = ICModel(Graph(3, [[0, 1], [1, 2]]), 0.5)
    assert exact_ic_expectation(model, [0]) == pytest.approx(1.75, abs=1e-12)
    assert exact_ic_expectation(model, []) == 0.0


def test_exact_ic_matches_plain_enumeration():
    for seed in range(5):
        g = random_digraph(7, 10, RngStream(seed))
        mean, _ = enumerate_ic(7, g.edges.tolist(), 0.3, [0, 3])
        assert exact_ic_expectation(ICModel(g, 0.3), [0, 3]) == pytest.approx(mean, abs=1e-12)


def test_exact_ic_isolated_seed():
    g = Graph(4, [[0, 1]])
    assert exact_ic_expectation(ICModel(g, 0.5), [0, 3]) == pytest.approx(2.5)


def test_exact_ic_too_many_edges():
    g = random_digraph(10, 25, RngStream(0))
    with pytest.raises(InstanceTooLarge):
        exact_ic_expectation(ICModel(g, 0.1), [0])


def test_submodularity_ratio_modular_and_coverage(toy_coverage):
    assert exact_submodularity_ratio(lambda b: float(np.sum(b)), 4) == 1.0
    assert exact_submodularity_ratio(toy_coverage, 3) == 1.0


def test_submodularity_ratio_supermodular_toy():
    def f(b):
        return {0: 0.0, 1: 1.0, 2: 1.0, 3: 3.0}[int(b[0]) + 2 * int(b[1])]
    assert exact_submodularity_ratio(f, 2) == pytest.approx(0.5)


def test_submodularity_ratio_matches_direct_loop():
    rng = np.random.default_rng(3)
    vals = {}
    for mask in range(16):
        vals[mask] = bin(mask).count("1") ** 1.5 + rng.random() * 0.1 * bin(mask).count("1")
    def f(b):
        return vals[sum(int(x) << i for i, x in enumerate(b))]
    expected = np.inf
    for y in range(16):
        for x in range(16):
            if x & ~y:
                continue
            for v in range(4):
                if y >> v & 1:
                    continue
                dy = vals[y | 1 << v] - vals[y]
                if dy > 0:
                    expected = min(expected, (vals[x | 1 << v] - vals[x]) / dy)
    expected = min(max(expected, 0.0), 1.0)
    assert exact_submodularity_ratio(f, 4) == pytest.approx(expected, abs=1e-12)


def test_cost_quantities():
    c = LinearCost([2.0, 1.0, 3.0])
    assert min_marginal_cost(c) == 1.0
    assert total_curvature(c) == pytest.approx(0.0, abs=1e-12)
    assert max_feasible_size(c, 3.0) == 2
    assert max_feasible_size(c, 0.5) == 0
    assert max_feasible_size(c, 6.0) == 3


def test_reduced_budget_modular_is_budget():
    assert reduced_budget(10.0, 1.0, 1.0, 0.0, 1.0, 4) == pytest.approx(10.0)
    assert reduced_budget(10.0, 0.5, 1.0, 0.0, 1.0, 3) == pytest.approx(10.0 * 1.5 / 3)
