"""Benchmark problems: influence maximization (IC model) and maximum coverage."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, TextIO

import numpy as np

from . import kernels
from .core import RngStream


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: np.ndarray  # (m, 2) int64 arcs, sorted, unique
    directed: bool = True
    indptr: np.ndarray = field(init=False, repr=False, compare=False)
    indices: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= self.n_vertices):
            raise GraphFormatError("edge endpoint outside [0, n)")
        edges = np.unique(edges, axis=0) if len(edges) else edges
        object.__setattr__(self, "edges", edges)
        counts = np.bincount(edges[:, 0], minlength=self.n_vertices) if len(edges) \
            else np.zeros(self.n_vertices, dtype=np.int64)
        indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", np.ascontiguousarray(edges[:, 1], dtype=np.int64))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def out_degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]


def load_edge_list(stream: TextIO | Iterable[str], directed: bool = True) -> Graph:
    """Parse ``u v [w]`` lines; ``#``/``%`` comments; ids remapped densely in sorted order.

    Undirected input is expanded to both arcs. Duplicate arcs are collapsed.
    """
    pairs = []
    for lineno, line in enumerate(stream, 1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        tok = s.split()
        if len(tok) < 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {s!r}")
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex id in {s!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative vertex id in {s!r}")
        pairs.append((u, v))
    if not pairs:
        raise GraphFormatError("edge list is empty")
    raw = np.array(pairs, dtype=np.int64)
    ids, dense = np.unique(raw, return_inverse=True)
    dense = dense.reshape(-1, 2)
    if not directed:
        dense = np.vstack([dense, dense[:, ::-1]])
    return Graph(len(ids), dense, directed)


def read_graph(path, directed: bool = True) -> Graph:
    with open(path) as fh:
        return load_edge_list(fh, directed)


def random_digraph(n: int, m: int, rng: RngStream) -> Graph:
    """``m`` distinct random arcs on ``n`` vertices, no self-loops."""
    if m > n * (n - 1):
        raise ValueError("too many arcs requested")
    chosen = rng.gen.choice(n * (n - 1), size=m, replace=False)
    u = chosen // (n - 1)
    v = chosen % (n - 1)
    v = v + (v >= u)
    return Graph(n, np.column_stack([u, v]))


@dataclass(frozen=True)
class ICModel:
    graph: Graph
    edge_probability: float = 0.05
    n_simulations: int = 500

    def __post_init__(self):
        if not 0.0 <= self.edge_probability <= 1.0:
            raise ValueError("edge_probability must lie in [0, 1]")
        if self.n_simulations < 1:
            raise ValueError("n_simulations must be positive")


def _seed_indices(seeds) -> np.ndarray:
    seeds = np.asarray(seeds)
    if seeds.dtype == bool:
        return np.flatnonzero(seeds).astype(np.int64)
    return np.unique(seeds.astype(np.int64))


def ic_single_run(model: ICModel, seeds, rng: RngStream) -> np.ndarray:
    """One cascade; returns the boolean mask of activated vertices (seeds included)."""
    g = model.graph
    return kernels.ic_cascade(g.indptr, g.indices, _seed_indices(seeds),
                              model.edge_probability, rng.uint64(), 0)


def ic_estimate(model: ICModel, seeds, rng: RngStream) -> float:
    """Mean cascade size over ``model.n_simulations`` runs (one objective evaluation)."""
    g = model.graph
    eval_seed = rng.uint64()
    idx = _seed_indices(seeds)
    if idx.size == 0:
        return 0.0
    total = kernels.ic_spread(g.indptr, g.indices, idx, model.edge_probability,
                              model.n_simulations, eval_seed)
    return total / model.n_simulations


@dataclass(frozen=True)
class CoverageInstance:
    universe_size: int
    sets: tuple
    indptr: np.ndarray = field(init=False, repr=False, compare=False)
    indices: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sets = tuple(np.unique(np.asarray(s, dtype=np.int64)) for s in self.sets)
        for s in sets:
            if s.size and (s[0] < 0 or s[-1] >= self.universe_size):
                raise ValueError("element id outside universe")
        object.__setattr__(self, "sets", sets)
        lengths = np.array([len(s) for s in sets], dtype=np.int64)
        indptr = np.zeros(len(sets) + 1, dtype=np.int64)
        np.cumsum(lengths, out=indptr[1:])
        object.__setattr__(self, "indptr", indptr)
        indices = np.concatenate(sets) if sets else np.zeros(0, dtype=np.int64)
        object.__setattr__(self, "indices", np.ascontiguousarray(indices, dtype=np.int64))

    @property
    def n(self) -> int:
        return len(self.sets)


def coverage_value(instance: CoverageInstance, selection) -> int:
    bits = np.asarray(selection)
    bits = bits.view(np.uint8) if bits.dtype == bool and bits.flags.c_contiguous \
        else np.ascontiguousarray(bits, dtype=np.uint8)
    if bits.shape[0] != instance.n:
        raise ValueError("selection length does not match the number of sets")
    return kernels.coverage_count(instance.indptr, instance.indices, bits,
                                  instance.universe_size)


@dataclass(frozen=True)
class LinearCost:
    item_costs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.item_costs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("item_costs must be a non-empty vector")
        if np.any(c <= 0):
            raise ValueError("item costs must be positive")
        c.setflags(write=False)
        object.__setattr__(self, "item_costs", c)

    @property
    def n(self) -> int:
        return self.item_costs.shape[0]

    @property
    def min_cost(self) -> float:
        return float(self.item_costs.min())

    def __call__(self, bits) -> float:
        return float(np.dot(self.item_costs, np.asarray(bits, dtype=bool)))


def build_im_costs(graph: Graph, rng: Optional[RngStream] = None, xi=None) -> LinearCost:
    """``c_v = 1 + (1 + |xi_v|) * outdeg(v)`` with ``xi_v ~ N(0, 0.5^2)`` drawn once."""
    d = graph.out_degree().astype(float)
    if xi is None:
        xi = rng.normal(0.0, 0.5, size=graph.n_vertices)
    xi = np.broadcast_to(np.asarray(xi, dtype=float), d.shape)
    return LinearCost(1.0 + (1.0 + np.abs(xi)) * d)


def build_mc_costs(graph: Graph, q: int = 6) -> LinearCost:
    if q < 0:
        raise ValueError("q must be non-negative")
    d = graph.out_degree().astype(float)
    return LinearCost(1.0 + np.maximum(d - q, 0.0))


def build_mc_sets(graph: Graph) -> CoverageInstance:
    sets = [np.concatenate([[v], graph.out_neighbors(v)]) for v in range(graph.n_vertices)]
    return CoverageInstance(graph.n_vertices, tuple(sets))


class SubsetProblem:
    """A monotone objective paired with a linear cost over ``n`` items."""

    deterministic = True
    name = "subset"

    def __init__(self, costs: LinearCost):
        self.costs = costs if isinstance(costs, LinearCost) else LinearCost(costs)

    @property
    def n(self) -> int:
        return self.costs.n

    def value(self, bits, rng: RngStream) -> float:
        raise NotImplementedError

    def exact_value(self, bits) -> float:
        """Noise-free objective, used by the oracles."""
        raise NotImplementedError

    def cost(self, bits) -> float:
        return self.costs(bits)


class CoverageProblem(SubsetProblem):
    name = "mc"

    def __init__(self, instance: CoverageInstance, costs):
        super().__init__(costs)
        if instance.n != self.costs.n:
            raise ValueError("instance and cost vector disagree on n")
        self.instance = instance

    def value(self, bits, rng=None) -> float:
        return float(coverage_value(self.instance, bits))

    exact_value = value


class InfluenceProblem(SubsetProblem):
    deterministic = False
    name = "im"

    def __init__(self, model: ICModel, costs):
        super().__init__(costs)
        if model.graph.n_vertices != self.costs.n:
            raise ValueError("graph and cost vector disagree on n")
        self.model = model

    def value(self, bits, rng: RngStream) -> float:
        return ic_estimate(self.model, bits, rng)

    def exact_value(self, bits) -> float:
        from .oracle import exact_ic_expectation
        return exact_ic_expectation(self.model, bits)


class FunctionProblem(SubsetProblem):
    """Wraps an arbitrary set function given as a callable on boolean vectors."""

    name = "function"

    def __init__(self, fn: Callable[[np.ndarray], float], costs):
        super().__init__(costs)
        self.fn = fn

    def value(self, bits, rng=None) -> float:
        return float(self.fn(np.asarray(bits, dtype=bool)))

    exact_value = value


def greedy_evaluations(n: int) -> int:
    """Evaluations used by the generalized greedy algorithm when every item is added."""
    return n * (n + 1) // 2
