import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bpodc.core import RngStream
from bpodc.dynamics import (ALGORITHMS, BudgetSchedule, EvalPolicy, InvalidBounds,
                            MismatchedTraces, RunTrace, ChangeRecord, UnknownAlgorithm,
                            format_schedule, gen_schedule, parse_schedule, read_schedule,
                            run_dynamic, summarize, write_schedule)
from bpodc.problems import CoverageInstance, CoverageProblem


def small_problem():
    sets = tuple([i, 8 + (i % 3)] for i in range(8))
    return CoverageProblem(CoverageInstance(11, sets), np.arange(1, 9, dtype=float))


def test_gen_schedule_zero_changes():
    s = gen_schedule(300, 0, 10, (100, 500), RngStream(0))
    assert s.budgets == () and s.all_budgets() == [300.0]


def test_gen_schedule_zero_delta_constant():
    s = gen_schedule(300, 5, 0, (100, 500), RngStream(0))
    assert s.budgets == (300.0,) * 5


def test_gen_schedule_clamps_at_bound():
    s = gen_schedule(100, 200, 50, (100, 500), RngStream(1))
    assert min(s.budgets) == 100.0
    assert all(100 <= b <= 500 for b in s.budgets)


@pytest.mark.parametrize("initial,bounds,delta", [(50, (100, 500), 10), (300, (500, 100), 10),
                                                  (300, (100, 500), -1)])
def test_gen_schedule_invalid(initial, bounds, delta):
    with pytest.raises(InvalidBounds):
        gen_schedule(initial, 3, delta, bounds, RngStream(0))


def test_gen_schedule_deterministic():
    a = gen_schedule(300, 50, 10, (100, 500), RngStream(9))
    b = gen_schedule(300, 50, 10, (100, 500), RngStream(9))
    assert a == b


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 100), st.floats(0, 100), st.floats(0, 1), st.floats(0, 30),
       st.integers(0, 60), st.integers(0, 2**32))
def test_schedule_stays_in_bounds(low, width, frac, delta, changes, seed):
    high = low + width
    initial = low + frac * width
    s = gen_schedule(initial, changes, delta, (low, high), RngStream(seed))
    prev = initial
    for b in s.budgets:
        assert low <= b <= high
        assert abs(b - prev) <= delta + 1e-9
        prev = b


def test_schedule_roundtrip(tmp_path):
    s = gen_schedule(300, 20, 10, (100, 500), RngStream(4))
    path = tmp_path / "s.txt"
    write_schedule(s, path)
    back = read_schedule(path)
    assert back.initial_budget == s.initial_budget and back.budgets == s.budgets
    assert format_schedule(back) == format_schedule(s)


def test_parse_schedule_rejects_missing_header():
    with pytest.raises(ValueError):
        parse_schedule("300\n310\n")


def test_eval_policy_fractions():
    p = EvalPolicy.from_fractions(20, 0.25, 0.5)
    assert (p.t_initial, p.t_change) == (52, 105)
    with pytest.raises(ValueError):
        EvalPolicy(-1, 3)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_run_dynamic_every_algorithm(algorithm):
    prob = small_problem()
    sched = BudgetSchedule(12.0, (8.0, 15.0, 5.0), (5.0, 15.0), 7.0)
    policy = EvalPolicy(300, 150)
    t = run_dynamic(algorithm, prob, sched, policy, seed=3)
    assert [r.budget for r in t.records] == [12.0, 8.0, 15.0, 5.0]
    for r in t.records:
        assert r.best_cost <= r.budget
    if algorithm not in ("gga", "agga"):
        assert [r.evals_consumed for r in t.records] == [300, 150, 150, 150]
    again = run_dynamic(algorithm, prob, sched, policy, seed=3)
    assert [r.best_f for r in again.records] == [r.best_f for r in t.records]


def test_run_dynamic_zero_change_eval_keeps_feasible():
    prob = small_problem()
    sched = BudgetSchedule(20.0, (6.0,), (6.0, 20.0), 14.0)
    t = run_dynamic("bpodc", prob, sched, EvalPolicy(2000, 0), seed=1)
    assert t.records[1].evals_consumed == 0
    assert t.records[1].best_cost <= 6.0


def test_run_dynamic_unknown_algorithm():
    with pytest.raises(UnknownAlgorithm):
        run_dynamic("nsga", small_problem(), BudgetSchedule(5.0, ()), EvalPolicy(10, 10), 0)


def _trace(values, alg="bpodc", budgets=None):
    budgets = budgets or [10.0] * len(values)
    t = RunTrace(alg, 0, "p", EvalPolicy(1, 1))
    t.records = [ChangeRecord(k, b, 1, v, 1.0, 1) for k, (b, v) in enumerate(zip(budgets, values))]
    return t


def test_summarize_values():
    rows = summarize([_trace([1.0, 2.0]), _trace([3.0, 2.0])])
    assert rows[0]["mean_best_f"] == 2.0
    assert rows[0]["std_best_f"] == pytest.approx(math.sqrt(2.0))
    assert rows[1]["std_best_f"] == 0.0


def test_summarize_single_trace_and_mismatch():
    assert summarize([_trace([4.0])])[0]["std_best_f"] == 0.0
    with pytest.raises(MismatchedTraces):
        summarize([_trace([1.0]), _trace([1.0], budgets=[11.0])])
    with pytest.raises(MismatchedTraces):
        summarize([])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=12), st.randoms())
def test_summarize_permutation_invariant(values, rnd):
    traces = [_trace([v]) for v in values]
    shuffled = traces[:]
    rnd.shuffle(shuffled)
    assert summarize(traces) == summarize(shuffled)
