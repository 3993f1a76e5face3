"""Shared fixtures: the seeded small-graph corpus and the acceptance report."""

from __future__ import annotations

import functools

import numpy as np
import pytest

from mcroute.graph import MultiCostGraph, generate_density_graph
from mcroute.index import build_index
from mcroute.scoring import register_score_function

CORPUS_SIZE = 200
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def corpus(count: int = CORPUS_SIZE):
    """Yield ``(i, g, k)`` for the seeded oracle corpus: n in [8, 25], edge
    density in [0.15, 0.3], d in {2, 3, 4}, integer costs in [1, 10] and a
    partition size cycling through 2, 3, 4."""
    rng = np.random.default_rng(0)
    for i in range(count):
        n = int(rng.integers(8, 26))
        density = float(rng.uniform(0.15, 0.3))
        d = int(rng.choice([2, 3, 4]))
        yield i, generate_density_graph(n, density, d, (1, 10), seed=i), 2 + i % 3


@functools.lru_cache(maxsize=None)
def score_fn(spec: str, d: int):
    """Registered once per (spec, d); registration probes monotonicity."""
    return register_score_function(spec, d)


@pytest.fixture(scope="session")
def corpus_indexes():
    """The whole corpus with an index per graph (r = 2 so contours group paths)."""
    return [(i, g, build_index(g, k=k, r=2, seed=i)) for i, g, k in corpus()]


@pytest.fixture
def diamond() -> MultiCostGraph:
    """0 -> {1, 2} -> 3 with a trade-off between the two middle vertices."""
    return MultiCostGraph(4, [
        (0, 1, (1, 5)), (1, 3, (1, 5)),
        (0, 2, (4, 1)), (2, 3, (4, 1)),
        (1, 2, (1, 1)),
    ])


def record(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[number] = (passed, detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")
