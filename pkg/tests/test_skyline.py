import numpy as np
import pytest

from mcroute.graph import MultiCostGraph, generate_density_graph, path_cost
from mcroute.lbop import single_cost_distances
from mcroute.oracle import oracle_skyline_set
from mcroute.skyline import (
    SkylineLimitExceeded, compute_skyline_paths, dominates, pareto_filter, skyline_fan,
)


def test_dominance_is_strict():
    assert dominates((1, 2), (1, 3))
    assert not dominates((1, 2), (1, 2))
    assert not dominates((1, 3), (2, 2))
    with pytest.raises(ValueError):
        dominates((1,), (1, 2))


def test_pareto_filter_keeps_first_of_equal_vectors():
    costs = [(3, 1), (1, 3), (2, 2), (2, 2), (3, 3), (1, 4)]
    assert pareto_filter(costs) == [1, 2, 0]


def test_diamond_skyline(diamond):
    sky = compute_skyline_paths(diamond, 0, 3)
    assert sky.costs == [(2, 10), (6, 7), (8, 2)]
    for p in sky.paths:
        assert path_cost(diamond, p.vertices) == p.cost


def test_trivial_and_unreachable_pairs():
    g = MultiCostGraph(3, [(0, 1, (1, 1))])
    assert compute_skyline_paths(g, 0, 0).costs == [(0, 0)]
    assert len(compute_skyline_paths(g, 0, 2)) == 0
    assert len(compute_skyline_paths(g, 0, 2, bounds=[(0, 0)] * 3)) == 0


@pytest.mark.parametrize("seed", range(25))
def test_matches_oracle_with_and_without_bounds(seed):
    rng = np.random.default_rng(seed)
    g = generate_density_graph(int(rng.integers(6, 12)), 0.3, int(rng.choice([2, 3])), seed=seed)
    s, e = 0, g.n - 1
    want = sorted(oracle_skyline_set(g, s, e).costs)
    assert sorted(compute_skyline_paths(g, s, e).costs) == want
    bounds = [tuple(single_cost_distances(g, x, e, "backward")[0][v] for x in range(g.d)) for v in range(g.n)]
    got = compute_skyline_paths(g, s, e, bounds)
    assert sorted(got.costs) == want
    for p in got.paths:
        assert len(set(p.vertices)) == len(p.vertices)
        assert path_cost(g, p.vertices) == p.cost


@pytest.mark.parametrize("seed", range(10))
def test_fan_agrees_with_single_pair_search(seed):
    g = generate_density_graph(11, 0.3, 2 + seed % 2, seed=100 + seed)
    fan = skyline_fan(g, 0, list(range(1, g.n)))
    for t in range(1, g.n):
        assert sorted(p.cost for p in fan.paths(t)) == sorted(compute_skyline_paths(g, 0, t).costs)
        for p in fan.paths(t):
            assert path_cost(g, p.vertices) == p.cost


def test_size_cap():
    # a ladder: every rung doubles the number of trade-off paths
    edges, n = [], 12
    for i in range(0, n - 2, 2):
        edges += [(i, i + 2, (1, 4)), (i, i + 1, (2, 1)), (i + 1, i + 2, (2, 1))]
    g = MultiCostGraph(n - 1, edges)
    assert len(compute_skyline_paths(g, 0, n - 2)) > 3
    with pytest.raises(SkylineLimitExceeded):
        compute_skyline_paths(g, 0, n - 2, max_size=3)
