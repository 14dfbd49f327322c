import numpy as np
import pytest

from bpodc.core import RngStream
from bpodc.problems import CoverageInstance, CoverageProblem

_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")


@pytest.fixture
def toy_coverage():
    """Sets {0,1}, {1,2}, {3} with unit costs."""
    return CoverageProblem(CoverageInstance(4, ([0, 1], [1, 2], [3])), [1.0, 1.0, 1.0])


def random_coverage(rng: RngStream, n=12, universe=30, cost_choices=(1, 2, 3), sizes=(2, 8)):
    sets = tuple(rng.gen.choice(universe, size=int(rng.gen.integers(sizes[0], sizes[1] + 1)),
                                replace=False) for _ in range(n))
    costs = rng.gen.choice(np.array(cost_choices, dtype=float), size=n)
    return CoverageProblem(CoverageInstance(universe, sets), costs)
