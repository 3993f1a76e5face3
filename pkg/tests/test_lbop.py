import numpy as np
import pytest
from scipy.sparse.csgraph import dijkstra

from mcroute.graph import generate_grid_graph, generate_random_graph, path_cost
from mcroute.index import build_index
from mcroute.lbop import combine_min, compute_lbop, single_cost_distances


@pytest.fixture(scope="module")
def setup():
    g = generate_random_graph(150, 450, 3, seed=11)
    index = build_index(g, k=6, r=3, seed=0)
    return g, index, index.engine(g)


def _full(g, reverse=False):
    return np.stack([dijkstra(g.csr(x, reverse), directed=True) for x in range(g.d)])


def test_pure_python_dijkstra_matches_scipy():
    g = generate_grid_graph(400, 1600, 2, seed=1)
    ref = _full(g)
    for s in (0, 57, 399):
        for x in range(2):
            assert np.array_equal(np.asarray(single_cost_distances(g, x, s)[0]), ref[x, s])
            back = single_cost_distances(g, x, s, "backward")[0]
            assert np.array_equal(np.asarray(back), ref[x, :, s])


def test_single_cost_argument_checks():
    g = generate_random_graph(5, 10, 2, seed=0)
    with pytest.raises(ValueError):
        single_cost_distances(g, 2, 0)
    with pytest.raises(ValueError):
        single_cost_distances(g, 0, 0, "sideways")


def test_combine_min_picks_relays_per_dimension():
    assert combine_min([((1, 5), (1, 5)), ((4, 1), (4, 1))], 2) == (2, 2)
    assert combine_min([], 2) == (float("inf"), float("inf"))


def test_full_bound_tables_equal_full_graph_distances(setup):
    g, _, eng = setup
    ref = _full(g)
    for v in (0, 17, 33, 98, 149):
        assert np.array_equal(eng.bounds_from(v, full=True), ref[:, v, :])
        assert np.array_equal(eng.bounds_to(v, full=True), ref[:, :, v])


def test_partial_tables_are_exact_where_filled(setup):
    g, index, eng = setup
    ref = _full(g)
    for v in (3, 71):
        for table, want in ((eng.bounds_from(v), ref[:, v, :]), (eng.bounds_to(v), ref[:, :, v])):
            filled = np.isfinite(table[0]) | ~np.isfinite(want[0])
            filled &= np.isfinite(table[0])
            assert np.array_equal(table[:, filled], want[:, filled])
            assert all(np.isfinite(table[0, b]) == np.isfinite(want[0, b]) for b in index.layout.borders)


def test_pairwise_lookup_matches_full_search(setup):
    g, _, eng = setup
    ref = _full(g)
    rng = np.random.default_rng(0)
    for s, e in rng.integers(0, g.n, size=(150, 2)):
        got = compute_lbop(eng, int(s), int(e)).phi
        assert np.array_equal(np.asarray(got, dtype=float), ref[:, s, e])


def test_witnesses_are_shortest_per_dimension(setup):
    g, _, eng = setup
    ref = _full(g)
    for s, e in ((0, 149), (12, 90), (77, 3)):
        lb = compute_lbop(eng, s, e, with_witnesses=True)
        if not lb.reachable:
            assert lb.witnesses == ()
            continue
        assert len(lb.witnesses) == g.d
        for x, p in enumerate(lb.witnesses):
            assert p.vertices[0] == s and p.vertices[-1] == e
            assert len(set(p.vertices)) == len(p.vertices)
            assert p.cost == path_cost(g, p.vertices)
            assert p.cost[x] == ref[x, s, e]


def test_inter_index_keeps_same_subset_cells_absent(setup):
    _, index, _ = setup
    inter, lay = index.inter, index.layout
    for u in inter.rows[:20]:
        for v in inter.cols[:20]:
            if lay.subset_of(int(u)) == lay.subset_of(int(v)):
                with pytest.raises(KeyError):
                    inter.get(int(u), int(v))
            else:
                assert len(inter.get(int(u), int(v))) == 3


def test_unreachable_pairs_have_infinite_lbop():
    from mcroute.graph import MultiCostGraph

    g = MultiCostGraph(4, [(0, 1, (1, 1)), (2, 3, (1, 1))])
    eng = build_index(g, k=2, r=1).engine(g)
    lb = compute_lbop(eng, 0, 3, with_witnesses=True)
    assert not lb.reachable and lb.witnesses == ()
    assert compute_lbop(eng, 2, 2).phi == (0, 0)
