"""Budget schedules and the dynamic-run orchestrator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import algorithms as alg
from .core import EvalCounter, RngStream, best_feasible
from .problems import greedy_evaluations

ALGORITHMS = ("bpodc", "bpodc-cold", "pomc", "eamc", "gga", "agga")


class InvalidBounds(ValueError):
    pass


class UnknownAlgorithm(ValueError):
    pass


class MismatchedTraces(ValueError):
    pass


@dataclass(frozen=True)
class BudgetSchedule:
    initial_budget: float
    budgets: tuple
    bounds: tuple = (-math.inf, math.inf)
    delta: float = 0.0

    @property
    def n_changes(self) -> int:
        return len(self.budgets)

    def all_budgets(self) -> list:
        """Initial budget followed by every post-change budget."""
        return [self.initial_budget, *self.budgets]


def gen_schedule(initial: float, n_changes: int, delta: float, bounds, rng: RngStream) -> BudgetSchedule:
    """Random walk with steps uniform on [-delta, delta], clamped to ``bounds``."""
    low, high = bounds
    if not low <= high:
        raise InvalidBounds(f"low bound {low} exceeds high bound {high}")
    if not low <= initial <= high:
        raise InvalidBounds(f"initial budget {initial} outside [{low}, {high}]")
    if delta < 0:
        raise InvalidBounds("delta must be non-negative")
    if n_changes < 0:
        raise InvalidBounds("number of changes must be non-negative")
    budgets = []
    b = float(initial)
    for _ in range(n_changes):
        b = min(max(b + rng.uniform(-delta, delta), low), high)
        budgets.append(b)
    return BudgetSchedule(float(initial), tuple(budgets), (low, high), delta)


def format_schedule(schedule: BudgetSchedule) -> str:
    lines = [f"initial {schedule.initial_budget:.17g}"]
    lines += [f"{b:.17g}" for b in schedule.budgets]
    return "\n".join(lines) + "\n"


def write_schedule(schedule: BudgetSchedule, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_schedule(schedule))


def parse_schedule(text: str) -> BudgetSchedule:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("initial"):
        raise ValueError("schedule must start with an 'initial <value>' header")
    parts = lines[0].split()
    if len(parts) != 2:
        raise ValueError(f"malformed schedule header {lines[0]!r}")
    initial = float(parts[1])
    budgets = tuple(float(x) for x in lines[1:])
    values = (initial, *budgets)
    return BudgetSchedule(initial, budgets, (min(values), max(values)))


def read_schedule(path) -> BudgetSchedule:
    with open(path) as fh:
        return parse_schedule(fh.read())


@dataclass(frozen=True)
class EvalPolicy:
    t_initial: int
    t_change: int

    def __post_init__(self):
        if self.t_initial < 0 or self.t_change < 0:
            raise ValueError("evaluation limits must be non-negative")

    @classmethod
    def from_fractions(cls, n: int, initial: float, change: float) -> "EvalPolicy":
        tg = greedy_evaluations(n)
        return cls(int(round(initial * tg)), int(round(change * tg)))


@dataclass
class ChangeRecord:
    change_index: int
    budget: float
    evals_consumed: int
    best_f: float
    best_cost: float
    archive_size: int
    min_select_prob: float = 1.0
    exceeds_t: bool = False


@dataclass
class RunTrace:
    algorithm: str
    seed: int
    problem_id: str
    policy: EvalPolicy
    records: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def best_f(self) -> np.ndarray:
        return np.array([r.best_f for r in self.records])


def _record(k, budget, evals, best, size, pmin=1.0, exceeds=False) -> ChangeRecord:
    if best is None:
        return ChangeRecord(k, budget, evals, math.nan, math.nan, size, pmin, exceeds)
    return ChangeRecord(k, budget, evals, best.f_value, best.cost_value, size, pmin, exceeds)


def run_dynamic(algorithm: str, problem, schedule: BudgetSchedule, policy: EvalPolicy,
                seed: int, warm_up_fraction: float = 1.0, problem_id: str = "",
                rng: Optional[RngStream] = None) -> RunTrace:
    """Replay ``schedule`` against one algorithm and record the best feasible value per phase."""
    if algorithm not in ALGORITHMS:
        raise UnknownAlgorithm(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    rng = rng if rng is not None else RngStream(seed)
    trace = RunTrace(algorithm, seed, problem_id or problem.name, policy)
    state = None
    for k, budget in enumerate(schedule.all_budgets()):
        limit = policy.t_initial if k == 0 else policy.t_change
        if algorithm in ("bpodc", "bpodc-cold", "pomc"):
            if algorithm == "pomc":
                state = alg.run_bpodc_phase(state, problem, budget, limit, False, rng, alg.UNIFORM)
            else:
                warm = algorithm == "bpodc" and k == 0
                state = alg.run_bpodc_phase(state, problem, budget, limit, warm, rng, alg.BIASED,
                                            warm_up_fraction)
            rec = _record(k, budget, state.counter.count, best_feasible(state.archive, budget),
                          len(state.archive), state.min_select_prob)
        elif algorithm == "eamc":
            state = alg.run_eamc_phase(state, problem, budget, limit, rng)
            rec = _record(k, budget, state.counter.count, state.best(budget),
                          len(state.population()))
        elif algorithm == "gga":
            counter = EvalCounter(greedy_evaluations(problem.n))
            sol = alg.gga(problem, budget, counter, rng)
            rec = _record(k, budget, counter.count, sol, 1, exceeds=counter.count > limit)
        else:  # agga
            counter = EvalCounter(greedy_evaluations(problem.n))
            if k == 0:
                state = alg.agga_init(problem, budget, counter, rng)
            else:
                state = alg.agga_adapt(state, problem, budget, counter, rng)
            rec = _record(k, budget, counter.count, state.solution(), 1,
                          exceeds=counter.count > limit)
        trace.records.append(rec)
    return trace


def summarize(traces: Sequence[RunTrace]) -> list:
    """Per-change mean and sample standard deviation of ``best_f`` across runs."""
    if not traces:
        raise MismatchedTraces("no traces to summarize")
    first = traces[0]
    budgets = [r.budget for r in first.records]
    for t in traces[1:]:
        if t.algorithm != first.algorithm or [r.budget for r in t.records] != budgets:
            raise MismatchedTraces("traces disagree on algorithm or schedule")
    rows = []
    for k, budget in enumerate(budgets):
        vals = sorted(t.records[k].best_f for t in traces)
        mean = math.fsum(vals) / len(vals)
        if len(vals) > 1:
            std = math.sqrt(math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1))
        else:
            std = 0.0
        rows.append({"algorithm": first.algorithm, "change_index": k, "budget": budget,
                     "mean_best_f": mean, "std_best_f": std, "n_runs": len(vals)})
    return rows
