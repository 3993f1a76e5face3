import numpy as np
import pytest

from mcroute.graph import MultiCostGraph, generate_density_graph, generate_grid_graph, path_cost
from mcroute.index import build_index
from mcroute.oracle import bf_search_baseline, oracle_optimal_on_shrunk, oracle_optimal_path
from mcroute.query import build_shrunk_graph, query_optimal, vertex_filter
from mcroute.scoring import register_score_function


@pytest.fixture(scope="module")
def medium():
    g = generate_grid_graph(900, 3600, 2, seed=3, correlation=0.3)
    return g, build_index(g, k=9, r=3, seed=0)


def test_diamond_optimum_depends_on_the_score(diamond):
    index = build_index(diamond, k=2, r=2)
    f = register_score_function("sum_sq", 2)
    res = query_optimal(index, diamond, 0, 3, f)
    assert res.found and res.score == 68 and res.path.vertices == (0, 2, 3)
    minimax = register_score_function("expr:10 * max(w1, w2) + w1 + w2", 2)
    assert query_optimal(index, diamond, 0, 3, minimax).path.vertices == (0, 1, 2, 3)
    lin = register_score_function("weighted:3,1", 2)
    res = query_optimal(index, diamond, 0, 3, lin)
    assert res.stats.method == "scalarized" and res.cost == (2, 10)


def test_same_vertex_and_unreachable():
    g = MultiCostGraph(4, [(0, 1, (1, 2)), (1, 0, (1, 1)), (2, 3, (3, 3))])
    index = build_index(g, k=2, r=1)
    f = register_score_function("sum_sq", 2)
    res = query_optimal(index, g, 2, 2, f)
    assert res.path.vertices == (2,) and res.score == 0
    miss = query_optimal(index, g, 0, 3, f)
    assert not miss.found and miss.score == float("inf")
    assert not query_optimal(index, g, 0, 3, register_score_function("sum", 2)).found


def test_argument_errors(diamond):
    index = build_index(diamond, k=2, r=1)
    with pytest.raises(ValueError, match="arity"):
        query_optimal(index, diamond, 0, 3, register_score_function("sum_sq", 3))
    with pytest.raises(ValueError, match="outside"):
        query_optimal(index, diamond, 0, 9, register_score_function("sum_sq", 2))
    other = MultiCostGraph(4, [(0, 1, (1, 1))])
    with pytest.raises(ValueError, match="belong"):
        query_optimal(index, other, 0, 1, register_score_function("sum_sq", 2))


@pytest.mark.parametrize("seed", range(12))
def test_small_graphs_match_oracle(seed):
    g = generate_density_graph(14, 0.25, 2 + seed % 3, seed=seed)
    index = build_index(g, k=3, r=2, seed=seed)
    rng = np.random.default_rng(seed)
    for spec in ("sum_sq", "sum_cube"):
        f = register_score_function(spec, g.d)
        for s, e in rng.integers(0, g.n, size=(4, 2)):
            want = oracle_optimal_path(g, int(s), int(e), f)
            got = query_optimal(index, g, int(s), int(e), f)
            assert got.score == want.score
            if got.found:
                assert got.path.vertices[0] == s and got.path.vertices[-1] == e
                assert len(set(got.path.vertices)) == len(got.path.vertices)
                assert path_cost(g, got.path.vertices) == got.cost


def test_linear_scalarized_equals_branch_and_bound(medium):
    g, index = medium
    f = register_score_function("weighted:2,1", 2)
    rng = np.random.default_rng(1)
    for s, e in rng.integers(0, g.n, size=(6, 2)):
        fast = query_optimal(index, g, int(s), int(e), f)
        slow = query_optimal(index, g, int(s), int(e), f, force_bnb=True)
        assert fast.score == slow.score


def test_index_agrees_with_baseline_on_medium_graph(medium):
    g, index = medium
    f = register_score_function("sum_sq", 2)
    rng = np.random.default_rng(2)
    for s, e in rng.integers(0, g.n, size=(8, 2)):
        got = query_optimal(index, g, int(s), int(e), f)
        base = bf_search_baseline(g, int(s), int(e), f)
        assert got.score == base.score
        assert got.stats.surviving_vertices <= got.stats.shrunk_vertices


def test_shrunk_graph_keeps_terminal_subsets_and_borders(medium):
    g, index = medium
    lay = index.layout
    s, e = 5, 800
    shrunk = build_shrunk_graph(index, g, s, e)
    ps, pe = lay.subset_of(s), lay.subset_of(e)
    keep = set(np.flatnonzero(shrunk.mask).tolist())
    assert set(lay.members[ps].tolist()) <= keep and set(lay.members[pe].tolist()) <= keep
    assert set(lay.borders) <= keep
    f = register_score_function("sum_sq", 2)
    filt = vertex_filter(shrunk, index, s, e, f)
    assert filt.survivors[s] and filt.survivors[e]
    assert filt.tau == f(filt.seed_path.cost)


def test_shrunk_graph_oracle_on_tiny_graph():
    g = generate_density_graph(10, 0.3, 2, seed=8)
    index = build_index(g, k=2, r=2)
    f = register_score_function("sum_sq", 2)
    for s, e in ((0, 9), (3, 7), (8, 1)):
        found = oracle_optimal_on_shrunk(build_shrunk_graph(index, g, s, e), f)
        want = oracle_optimal_path(g, s, e, f)
        assert (found[0] if found else float("inf")) == want.score


@pytest.mark.parametrize("flag", ["tau", "dominance", "contour", "filtering"])
def test_pruning_toggles_do_not_change_scores(medium, flag):
    g, index = medium
    f = register_score_function("sum_cube", 2)
    rng = np.random.default_rng(4)
    for s, e in rng.integers(0, g.n, size=(4, 2)):
        on = query_optimal(index, g, int(s), int(e), f)
        off = query_optimal(index, g, int(s), int(e), f, **{flag: False})
        assert on.score == off.score
