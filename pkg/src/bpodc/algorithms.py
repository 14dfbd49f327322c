"""BPODC, POMC, EAMC, the greedy baselines GGA/AGGA, and the FPOMC goodness score."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (BudgetExhausted, EmptyArchiveError, EvalCounter, ParetoArchive,
                   RngStream, Solution, best_feasible, bitwise_mutate, evaluate,
                   make_solution, uniform_index)

DEFAULT_EPSILON = 1e-10
DEFAULT_C = 1e12


@dataclass(frozen=True)
class SelectionPolicy:
    kind: str = "biased"  # "uniform" | "biased"
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.kind not in ("uniform", "biased"):
            raise ValueError(f"unknown selection policy {self.kind!r}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


UNIFORM = SelectionPolicy("uniform")
BIASED = SelectionPolicy("biased")


def _biased_weights(costs, budget: float, epsilon: float) -> np.ndarray:
    return 1.0 / (np.abs(np.asarray(costs, dtype=float) - budget) + epsilon)


def biased_probabilities(costs, budget: float, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Normalized weights ``1 / (|cost - B| + eps)``."""
    w = _biased_weights(costs, budget, epsilon)
    return w / w.sum()


_SMALL_ARCHIVE = 48


def _biased_index(archive, budget: float, epsilon: float, rng: RngStream):
    """Roulette draw over the biased weights; returns (index, smallest probability).

    Both branches accumulate weights sequentially, so they pick identically.
    """
    size = len(archive)
    if size == 0:
        raise EmptyArchiveError("cannot select from an empty archive")
    u = rng.gen.random()
    if size <= _SMALL_ARCHIVE:
        cum, acc, wmin = [], 0.0, math.inf
        for m in archive.members if isinstance(archive, ParetoArchive) else archive:
            w = 1.0 / (abs(m.cost_value - budget) + epsilon)
            acc += w
            cum.append(acc)
            if w < wmin:
                wmin = w
        target = u * acc
        for i, c in enumerate(cum):
            if target < c:
                return i, wmin / acc
        return size - 1, wmin / acc
    costs = archive.cost_array() if isinstance(archive, ParetoArchive) else \
        np.array([m.cost_value for m in archive], dtype=float)
    w = _biased_weights(costs, budget, epsilon)
    cum = np.cumsum(w)
    total = cum[-1]
    idx = int(np.searchsorted(cum, u * total, side="right"))
    return min(idx, size - 1), float(w.min() / total)


def biased_select(archive: ParetoArchive, budget: float, epsilon: float = DEFAULT_EPSILON,
                  rng: Optional[RngStream] = None) -> Solution:
    idx, _ = _biased_index(archive, budget, epsilon, rng)
    return archive[idx]


@dataclass
class ParetoState:
    archive: ParetoArchive
    counter: EvalCounter
    warm_up_active: bool = False
    current_budget: float = 0.0
    total_evals: int = 0
    min_select_prob: float = 1.0
    trace: Optional[list] = None  # (parent index, child bytes, accepted) per step when set


def pareto_step(state: ParetoState, policy: SelectionPolicy, problem, rng: RngStream) -> ParetoState:
    """One select-mutate-evaluate-insert iteration. Consumes one evaluation."""
    if state.counter.remaining <= 0:
        raise BudgetExhausted("phase evaluation limit reached")
    archive = state.archive
    if state.warm_up_active or policy.kind == "uniform":
        idx = uniform_index(len(archive), rng)
        pmin = 1.0 / len(archive)
    else:
        idx, pmin = _biased_index(archive, state.current_budget, policy.epsilon, rng)
    if pmin < state.min_select_prob:
        state.min_select_prob = pmin
    child_bits = bitwise_mutate(archive[idx], rng)
    child = evaluate(problem, child_bits, state.current_budget, state.counter, rng)
    state.total_evals += 1
    accepted = archive.insert(child)
    if state.trace is not None:
        state.trace.append((idx, child_bits.tobytes(), accepted))
    return state


def init_pareto_state(problem, budget: float, eval_limit: int, rng: RngStream,
                      trace: bool = False) -> ParetoState:
    counter = EvalCounter(eval_limit)
    state = ParetoState(ParetoArchive(), counter, current_budget=budget,
                        trace=[] if trace else None)
    if eval_limit > 0:
        zero = evaluate(problem, np.zeros(problem.n, dtype=bool), budget, counter, rng)
        state.archive.insert(zero)
        state.total_evals += 1
    return state


def run_bpodc_phase(state: Optional[ParetoState], problem, budget: float, eval_limit: int,
                    warm_up: bool, rng: RngStream, policy: SelectionPolicy = BIASED,
                    warm_up_fraction: float = 1.0, trace: bool = False) -> ParetoState:
    """Run one budget phase of BPODC (or POMC with ``policy=UNIFORM``).

    The first phase starts from the empty set, whose evaluation is charged to the
    phase. Later phases continue from the carried archive without touching it.
    """
    if state is None or len(state.archive) == 0:
        state = init_pareto_state(problem, budget, eval_limit, rng, trace)
    else:
        state.counter = EvalCounter(eval_limit)
        state.current_budget = budget
    state.min_select_prob = 1.0
    warm_steps = int(round(warm_up_fraction * eval_limit)) if warm_up else 0
    while state.counter.remaining > 0:
        state.warm_up_active = state.counter.count < warm_steps
        pareto_step(state, policy, problem, rng)
    state.warm_up_active = False
    return state


def run_pomc_phase(state, problem, budget, eval_limit, rng, trace=False):
    return run_bpodc_phase(state, problem, budget, eval_limit, False, rng, UNIFORM,
                           trace=trace)


# -- greedy baselines --------------------------------------------------------

@dataclass
class GreedyState:
    selection: np.ndarray
    order_added: list
    f_value: float
    cost_value: float
    budget: float
    counter: Optional[EvalCounter] = None

    def solution(self) -> Solution:
        return make_solution(self.selection, self.f_value, self.cost_value, self.budget)


def _greedy_add(problem, bits, f_x, budget, counter, rng, order, first_round=None):
    """Add items by best marginal-gain/cost ratio until nothing fits.

    ``first_round``, when given, receives ``{v: f(X + v)}`` from the first round.
    """
    bits = bits.copy()
    c_x = problem.cost(bits)
    candidates = [v for v in range(problem.n) if not bits[v]]
    rnd = 0
    while candidates:
        best_v, best_ratio, best_f, best_c = -1, -math.inf, 0.0, 0.0
        keep = []
        for v in candidates:
            bits[v] = True
            c_new = problem.cost(bits)
            if c_new > budget:
                bits[v] = False
                continue  # costs only grow, so v never fits again
            keep.append(v)
            counter.tick()
            f_new = problem.value(bits, rng)
            bits[v] = False
            if first_round is not None and rnd == 0:
                first_round[v] = f_new
            ratio = (f_new - f_x) / (c_new - c_x)
            if ratio > best_ratio:
                best_v, best_ratio, best_f, best_c = v, ratio, f_new, c_new
        if best_v < 0:
            break
        bits[best_v] = True
        order.append(best_v)
        f_x, c_x = best_f, best_c
        keep.remove(best_v)
        candidates = keep
        rnd += 1
    return bits, f_x, c_x


def _gga(problem, budget, counter, rng) -> GreedyState:
    if counter is None:
        counter = EvalCounter(problem.n * (problem.n + 1) // 2)
    singles: dict = {}
    order: list = []
    bits, f_x, c_x = _greedy_add(problem, np.zeros(problem.n, dtype=bool), 0.0, budget,
                                 counter, rng, order, singles)
    if singles:
        v_star = max(sorted(singles), key=lambda v: singles[v])
        if singles[v_star] > f_x:
            bits = np.zeros(problem.n, dtype=bool)
            bits[v_star] = True
            order = [v_star]
            f_x, c_x = singles[v_star], problem.cost(bits)
    return GreedyState(bits, order, f_x, c_x, budget, counter)


def gga(problem, budget: float, counter: Optional[EvalCounter] = None,
        rng: Optional[RngStream] = None) -> Solution:
    """Generalized greedy: ratio-greedy chain compared with the best feasible single item."""
    return _gga(problem, budget, counter, rng).solution()


def agga_init(problem, budget, counter=None, rng=None) -> GreedyState:
    return _gga(problem, budget, counter, rng)


def agga_adapt(state: GreedyState, problem, new_budget: float,
               counter: Optional[EvalCounter] = None, rng: Optional[RngStream] = None) -> GreedyState:
    """Delete lowest-ratio items while over budget; otherwise keep adding greedily."""
    if counter is None:
        counter = EvalCounter(problem.n * (problem.n + 1) // 2)
    bits = state.selection.copy()
    order = list(state.order_added)
    f_x, c_x = state.f_value, state.cost_value
    if c_x > new_budget:
        while c_x > new_budget:
            best_v, best_ratio, best_f, best_c = -1, math.inf, 0.0, 0.0
            for v in np.flatnonzero(bits):
                bits[v] = False
                counter.tick()
                f_without = problem.value(bits, rng)
                c_without = problem.cost(bits)
                bits[v] = True
                ratio = (f_x - f_without) / (c_x - c_without)
                if ratio < best_ratio:
                    best_v, best_ratio, best_f, best_c = int(v), ratio, f_without, c_without
            bits[best_v] = False
            order.remove(best_v)
            f_x, c_x = best_f, best_c
        if not bits.any():
            f_x, c_x = 0.0, 0.0
    else:
        bits, f_x, c_x = _greedy_add(problem, bits, f_x, new_budget, counter, rng, order)
    return GreedyState(bits, order, f_x, c_x, new_budget, counter)


# -- EAMC ----------------------------------------------------------------------

def surrogate_g(f_val: float, cost: float, budget: float, alpha_f: float = 1.0,
                size: Optional[int] = None) -> float:
    """``f / (1 - exp(-alpha * cost / B))``; equals ``f`` for the empty set."""
    if size == 0 or cost == 0:
        return f_val
    return f_val / (1.0 - math.exp(-alpha_f * cost / budget))


@dataclass
class EAMCBin:
    best_g: Solution
    g: float
    best_f: Solution


@dataclass
class EAMCState:
    bins: dict
    counter: EvalCounter
    alpha_f: float = 1.0
    current_budget: float = 0.0
    total_evals: int = 0

    def population(self) -> list:
        pop = []
        for size in sorted(self.bins):
            b = self.bins[size]
            pop.append(b.best_g)
            if b.best_f is not b.best_g:
                pop.append(b.best_f)
        return pop

    def best(self, budget: float) -> Optional[Solution]:
        return best_feasible(self.population(), budget)


def eamc_init(problem, budget: float, eval_limit: int, rng: RngStream,
              alpha_f: float = 1.0) -> EAMCState:
    counter = EvalCounter(eval_limit)
    state = EAMCState({}, counter, alpha_f, budget)
    if eval_limit > 0:
        zero = evaluate(problem, np.zeros(problem.n, dtype=bool), budget, counter, rng)
        state.bins[0] = EAMCBin(zero, zero.f_value, zero)
        state.total_evals += 1
    return state


def eamc_offer(state: EAMCState, child: Solution) -> bool:
    """Apply the per-size replacement rule; infeasible children are discarded."""
    if child.cost_value > state.current_budget:
        return False
    size = child.size
    g = surrogate_g(child.f_value, child.cost_value, state.current_budget, state.alpha_f, size)
    b = state.bins.get(size)
    if b is None:
        state.bins[size] = EAMCBin(child, g, child)
        return True
    changed = False
    if g > b.g:
        b.best_g, b.g = child, g
        changed = True
    if child.f_value > b.best_f.f_value:
        b.best_f = child
        changed = True
    return changed


def eamc_step(state: EAMCState, problem, rng: RngStream) -> EAMCState:
    pop = state.population()
    parent = pop[uniform_index(len(pop), rng)]
    child = evaluate(problem, bitwise_mutate(parent, rng), state.current_budget,
                     state.counter, rng)
    state.total_evals += 1
    eamc_offer(state, child)
    return state


def eamc_rebudget(state: EAMCState, new_budget: float) -> EAMCState:
    """Recompute g at the new budget from cached (f, cost); no evaluations."""
    state.current_budget = new_budget
    for size, b in state.bins.items():
        g_keep = surrogate_g(b.best_g.f_value, b.best_g.cost_value, new_budget, state.alpha_f, size)
        g_other = surrogate_g(b.best_f.f_value, b.best_f.cost_value, new_budget, state.alpha_f, size)
        if g_other > g_keep:
            b.best_g, b.g = b.best_f, g_other
        else:
            b.g = g_keep
    return state


def run_eamc_phase(state: Optional[EAMCState], problem, budget: float, eval_limit: int,
                   rng: RngStream, alpha_f: float = 1.0) -> EAMCState:
    if state is None or not state.bins:
        state = eamc_init(problem, budget, eval_limit, rng, alpha_f)
    else:
        state.counter = EvalCounter(eval_limit)
        if budget != state.current_budget:
            eamc_rebudget(state, budget)
    while state.counter.remaining > 0:
        eamc_step(state, problem, rng)
    return state


def goodness_h(f_x: float, c_x: float, f_z: float, c_z: float, big_c: float = DEFAULT_C) -> float:
    """Goodness of X relative to a reference point Z."""
    if c_x > c_z:
        return (f_x - f_z) / (c_x - c_z)
    return (f_x - f_z) * big_c + c_z - c_x
