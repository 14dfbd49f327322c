"""Solutions, domination, the Pareto archive and the shared variation operators."""

from __future__ import annotations

import enum
import functools
import zlib
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


@functools.total_ordering
class _NegInf:
    """Sentinel ordered below every real number. Not usable in arithmetic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NEG_INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("bpodc.NEG_INF")

    def __lt__(self, other):
        return other is not self

    def __reduce__(self):
        return (_NegInf, ())


NEG_INF = _NegInf()


class BudgetExhausted(RuntimeError):
    """Raised when an evaluation is requested past the counter limit."""


class EmptyArchiveError(ValueError):
    pass


class Relation(enum.Enum):
    DOMINATES = "strictly-dominates"
    EQUAL = "equal"
    DOMINATED_BY = "dominated-by"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True, slots=True, eq=False)
class Solution:
    bits: np.ndarray
    f_value: float
    cost_value: float
    f1: object  # float or NEG_INF
    f2: float
    gen_budget: float

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.bits))

    @property
    def objectives(self):
        return (self.f1, self.f2)

    def __repr__(self):
        ones = np.flatnonzero(self.bits).tolist()
        return (f"Solution(items={ones}, f={self.f_value:g}, "
                f"cost={self.cost_value:g}, f1={self.f1!r}, B={self.gen_budget:g})")


def make_solution(bits, f_value: float, cost_value: float, budget: float) -> Solution:
    bits = np.array(bits, dtype=bool)
    bits.setflags(write=False)
    f1 = f_value if cost_value <= budget + 1 else NEG_INF
    return Solution(bits, float(f_value), float(cost_value), f1, -float(cost_value),
                    float(budget))


def weakly_dominates(a: Solution, b: Solution) -> bool:
    return a.f1 >= b.f1 and a.f2 >= b.f2


def dominates(a: Solution, b: Solution) -> Relation:
    ab = weakly_dominates(a, b)
    ba = weakly_dominates(b, a)
    if ab and ba:
        return Relation.EQUAL
    if ab:
        return Relation.DOMINATES
    if ba:
        return Relation.DOMINATED_BY
    return Relation.INCOMPARABLE


class ParetoArchive:
    """Mutually incomparable solutions, kept in insertion order."""

    def __init__(self, members: Sequence[Solution] = ()):
        self.members: list[Solution] = []
        self._costs = None
        for m in members:
            self.insert(m)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def copy(self) -> "ParetoArchive":
        new = ParetoArchive()
        new.members = list(self.members)
        return new

    def cost_array(self) -> np.ndarray:
        if self._costs is None:
            self._costs = np.fromiter((m.cost_value for m in self.members), dtype=float,
                                      count=len(self.members))
        return self._costs

    def insert(self, x: Solution) -> bool:
        f1, f2 = x.f1, x.f2
        for z in self.members:
            if z.f1 >= f1 and z.f2 >= f2 and (z.f1 > f1 or z.f2 > f2):
                return False
        self.members = [z for z in self.members if not (f1 >= z.f1 and f2 >= z.f2)]
        self.members.append(x)
        self._costs = None
        return True


def archive_insert(archive: ParetoArchive, x: Solution):
    accepted = archive.insert(x)
    return archive, accepted


@dataclass
class EvalCounter:
    limit: int
    count: int = 0

    @property
    def remaining(self) -> int:
        return self.limit - self.count

    def tick(self):
        if self.count >= self.limit:
            raise BudgetExhausted(f"evaluation limit {self.limit} reached")
        self.count += 1


def _label_key(label) -> int:
    if isinstance(label, int):
        return label & 0xFFFFFFFF
    return zlib.crc32(str(label).encode())


@dataclass
class RngStream:
    """Seeded numpy generator with reproducible labelled sub-streams."""

    seed: int
    path: tuple = ()
    gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.seed = int(self.seed) & ((1 << 64) - 1)
        ss = np.random.SeedSequence(self.seed, spawn_key=tuple(_label_key(l) for l in self.path))
        self.gen = np.random.Generator(np.random.PCG64(ss))

    def child(self, *labels) -> "RngStream":
        return RngStream(self.seed, self.path + labels)

    def random(self, size=None):
        return self.gen.random(size)

    def integers(self, low, high=None, size=None):
        return self.gen.integers(low, high, size)

    def uniform(self, low, high, size=None):
        return self.gen.uniform(low, high, size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.gen.normal(loc, scale, size)

    def uint64(self) -> int:
        return int(self.gen.integers(0, 1 << 64, dtype=np.uint64))


def evaluate(problem, bits, budget: float, counter: EvalCounter, rng: RngStream) -> Solution:
    counter.tick()
    bits = np.asarray(bits, dtype=bool)
    return make_solution(bits, problem.value(bits, rng), problem.cost(bits), budget)


def bitwise_mutate(x, rng: RngStream) -> np.ndarray:
    bits = x.bits if isinstance(x, Solution) else np.asarray(x, dtype=bool)
    n = bits.shape[0]
    if n < 1:
        raise ValueError("cannot mutate an empty bit-vector")
    return bits ^ (rng.gen.random(n) < 1.0 / n)


def uniform_index(size: int, rng: RngStream) -> int:
    if size < 1:
        raise EmptyArchiveError("cannot select from an empty archive")
    if size == 1:
        return 0
    return int(rng.gen.integers(size))


def uniform_select(archive, rng: RngStream) -> Solution:
    members = archive.members if isinstance(archive, ParetoArchive) else list(archive)
    return members[uniform_index(len(members), rng)]


def best_feasible(archive, budget: float) -> Optional[Solution]:
    best = None
    for x in archive:
        if x.cost_value > budget:
            continue
        if (best is None or x.f_value > best.f_value
                or (x.f_value == best.f_value and x.cost_value < best.cost_value)):
            best = x
    return best
