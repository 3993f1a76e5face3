import itertools

import numpy as np
import pytest

from mcroute.graph import generate_density_graph, generate_random_graph, path_cost
from mcroute.oracle import (
    OracleTooLarge, bf_search_baseline, contiguous_split_optimum, enumerate_simple_paths,
    optimal_partition_diameter, oracle_optimal_path, oracle_skyline_set, random_simple_path,
)
from mcroute.scoring import register_score_function
from mcroute.skyline import pareto_filter


def _all_paths(g, s, e):
    return [(p, path_cost(g, p)) for p in enumerate_simple_paths(g, s, e)]


@pytest.mark.parametrize("seed", range(15))
def test_optimum_and_skyline_match_plain_enumeration(seed):
    g = generate_density_graph(9, 0.3, 2 + seed % 3, seed=seed)
    paths = _all_paths(g, 0, g.n - 1)
    for spec in ("sum_sq", "sum_cube"):
        f = register_score_function(spec, g.d)
        res = oracle_optimal_path(g, 0, g.n - 1, f)
        if not paths:
            assert not res.found
            continue
        best = min(f(c) for _, c in paths)
        first = next(p for p, c in paths if f(c) == best)
        assert res.score == best and res.path.vertices == first
    costs = [c for _, c in paths]
    want = sorted({costs[i] for i in pareto_filter(costs)})
    assert sorted(oracle_skyline_set(g, 0, g.n - 1).costs) == want


def test_enumeration_is_lexicographic_and_simple():
    g = generate_density_graph(8, 0.4, 2, seed=3)
    seqs = list(enumerate_simple_paths(g, 0, 7))
    assert seqs == sorted(seqs)
    assert all(len(set(p)) == len(p) for p in seqs)
    assert list(enumerate_simple_paths(g, 0, 7, limit=2)) == seqs[:2]


def test_size_guard():
    g = generate_random_graph(40, 100, 2, seed=0)
    with pytest.raises(OracleTooLarge):
        oracle_optimal_path(g, 0, 1, register_score_function("sum_sq", 2))


def test_random_simple_paths_are_simple_and_costed():
    g = generate_random_graph(30, 120, 3, seed=1)
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = random_simple_path(g, int(rng.integers(g.n)), rng)
        assert len(set(p.vertices)) == len(p.vertices)
        assert p.cost == path_cost(g, p.vertices)


def test_baseline_matches_oracle():
    rng = np.random.default_rng(5)
    for seed in range(10):
        g = generate_density_graph(12, 0.25, 2, seed=seed)
        f = register_score_function("sum_sq", 2)
        for s, e in rng.integers(0, g.n, size=(3, 2)):
            want = oracle_optimal_path(g, int(s), int(e), f).score
            assert bf_search_baseline(g, int(s), int(e), f).score == want
            assert bf_search_baseline(g, int(s), int(e), f, tau=False, dominance=False).score == want


def test_clustering_oracles_against_brute_force():
    rng = np.random.default_rng(6)
    for _ in range(20):
        pts = [tuple(int(x) for x in rng.integers(0, 20, size=2)) for _ in range(6)]
        r = 2
        # every labelling into at most r groups
        best = min(
            max((max((np.hypot(pts[a][0] - pts[b][0], pts[a][1] - pts[b][1])
                      for a in range(6) for b in range(6) if lab[a] == lab[b] == t), default=0)
                 for t in range(r)))
            for lab in itertools.product(range(r), repeat=6)
        )
        assert optimal_partition_diameter(pts, r) == pytest.approx(best)
    line = [(0, 4), (1, 3), (3, 1), (4, 0)]
    assert contiguous_split_optimum(line, 2) == pytest.approx(2 ** 0.5)
    assert contiguous_split_optimum(line, 1) == pytest.approx(32 ** 0.5)
