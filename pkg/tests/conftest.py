import itertools
import sys
from fractions import Fraction

import pytest

from hyperreg import DensityFunction, KGraph, RegularityInstance
from hyperreg.rng import substream
from hyperreg.transforms import PlantSpec, plant


def random_kgraph(k: int, n: int, p: float, seed: int) -> KGraph:
    rng = substream(seed, "graph", k, n)
    edges = frozenset(
        e for e in itertools.combinations(range(n), k) if rng.random() < p
    )
    return KGraph(k, n, edges)


def planted(a, n, seed, density=Fraction(1, 2), epsilon=Fraction(1, 10)):
    d = DensityFunction.constant(a, density)
    R = RegularityInstance(epsilon, a, d)
    H, F, _ = plant(PlantSpec(R, n, seed))
    return H, F, R


@pytest.fixture
def small_planted_k3():
    return planted((4, 2), 24, 7)


@pytest.fixture
def small_planted_k2():
    return planted((4,), 40, 5)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "SUMMARY_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
