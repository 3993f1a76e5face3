import io

import numpy as np
import pytest

from mcroute.graph import (
    GraphFormatError, MultiCostGraph, erase_loops, format_graph, generate_density_graph,
    generate_grid_graph, generate_random_graph, generate_road_graph, induced_subgraph, load_graph,
    make_path, path_cost, save_graph,
)


def test_text_roundtrip_keeps_content_hash():
    g = generate_random_graph(30, 90, 3, seed=4)
    buf = io.StringIO()
    save_graph(g, buf)
    again = load_graph(io.StringIO(buf.getvalue()))
    assert format_graph(again) == buf.getvalue()
    assert again.content_hash() == g.content_hash()


def test_undirected_lines_become_two_edges():
    g = load_graph(io.StringIO("3 2 2 undirected\n0 1 1 2\n1 2 3 4\n"))
    assert g.m == 4
    assert g.edge_cost[(1, 0)] == (1, 2)


def test_float_costs_stay_float_and_ints_stay_int():
    g = load_graph(io.StringIO("2 1 2\n0 1 1.5 2\n"))
    assert not g.integral and g.edge_cost[(0, 1)] == (1.5, 2.0)
    h = load_graph(io.StringIO("2 1 2\n0 1 1 2.0\n"))
    assert h.integral and h.edge_cost[(0, 1)] == (1, 2)


@pytest.mark.parametrize("text, fragment", [
    ("", "empty"),
    ("2 1\n0 1 1\n", "header"),
    ("2 2 1\n0 1 1\n", "declares 2 edges"),
    ("2 1 1\n0 0 1\n", "self-loop"),
    ("2 1 1\n0 5 1\n", "out of range"),
    ("2 1 1\n0 1 -1\n", "negative"),
    ("2 1 1\n0 1 x\n", "not a number"),
    ("2 1 2\n0 1 1\n", "expected 4 fields"),
    ("2 1 1\n0 1 inf\n", "non-finite"),
])
def test_malformed_input_is_rejected_with_line(text, fragment):
    with pytest.raises(GraphFormatError, match=fragment):
        load_graph(io.StringIO(text))


def test_duplicates_error_or_keep_first():
    text = "2 2 1\n0 1 3\n0 1 7\n"
    with pytest.raises(GraphFormatError, match="duplicate"):
        load_graph(io.StringIO(text))
    g = load_graph(io.StringIO(text), on_duplicate="keep_first")
    assert g.edge_cost[(0, 1)] == (3,) and g.duplicates == 1


def test_adjacency_sorted_and_consistent():
    g = generate_random_graph(20, 60, 2, seed=1)
    for u in range(g.n):
        targets = [v for v, _ in g.out_adj[u]]
        assert targets == sorted(targets)
    assert sum(len(a) for a in g.in_adj) == g.m
    assert all(g.has_edge(int(u), int(v)) for u, v in zip(g.src, g.dst))


@pytest.mark.parametrize("maker", [
    lambda: generate_random_graph(50, 200, 2, seed=2),
    lambda: generate_density_graph(12, 0.25, 3, seed=2),
    lambda: generate_grid_graph(400, 2000, 2, seed=2),
    lambda: generate_grid_graph(400, 1200, 2, seed=2, correlation=0.5),
])
def test_generators_are_seeded_and_in_range(maker):
    a, b = maker(), maker()
    assert a.content_hash() == b.content_hash()
    assert a.costs.min() >= 1 and a.costs.max() <= 10


def test_generator_edge_counts():
    assert generate_random_graph(50, 200, 2, seed=0).m == 200
    assert generate_grid_graph(400, 2000, 2, seed=0).m == 2000
    assert generate_density_graph(12, 0.25, 2, seed=0).m == round(0.25 * 12 * 11)
    road = generate_road_graph(1000, 1.2, 2, seed=0)
    assert road.m == 2 * round(1.2 * 1000)


def test_generator_argument_checks():
    with pytest.raises(ValueError):
        generate_random_graph(3, 7, 2)
    with pytest.raises(ValueError):
        generate_grid_graph(100, 301, 2)
    with pytest.raises(ValueError):
        generate_grid_graph(100, 300, 2, correlation=1.5)


def test_correlation_makes_components_agree():
    loose = generate_grid_graph(2500, 10000, 2, seed=5)
    tight = generate_grid_graph(2500, 10000, 2, seed=5, correlation=0.8)
    r_loose = np.corrcoef(loose.costs.T)[0, 1]
    r_tight = np.corrcoef(tight.costs.T)[0, 1]
    assert abs(r_loose) < 0.1 < 0.8 < r_tight


def test_road_graph_is_connected_two_way():
    from scipy.sparse.csgraph import connected_components

    g = generate_road_graph(800, 1.2, 2, seed=9)
    count, _ = connected_components(g.csr(0), directed=True, connection="strong")
    assert count == 1


def test_paths_and_loop_erasure(diamond):
    assert path_cost(diamond, (0, 1, 3)) == (2, 10)
    assert make_path(diamond, (0, 1, 2, 3)).cost == (6, 7)
    with pytest.raises(ValueError):
        make_path(diamond, (0, 3))
    with pytest.raises(ValueError):
        make_path(diamond, (0, 1, 0))
    assert erase_loops((0, 1, 2, 1, 3)) == (0, 1, 3)
    assert erase_loops((5, 6, 7, 5, 8)) == (5, 8)


def test_induced_subgraph_maps_back_to_parent():
    g = generate_random_graph(30, 120, 2, seed=3)
    sub = induced_subgraph(g, [3, 7, 11, 20, 25])
    assert list(sub.origin) == [3, 7, 11, 20, 25]
    for u, v, c in sub.edges():
        assert g.edge_cost[(int(sub.origin[u]), int(sub.origin[v]))] == c
    nested = induced_subgraph(sub, [1, 3])
    assert list(nested.origin) == [7, 20]


def test_constructor_rejects_bad_edges():
    with pytest.raises(GraphFormatError):
        MultiCostGraph(2, [(0, 1, (1, 2)), (0, 1, (1, 2))])
    with pytest.raises(GraphFormatError):
        MultiCostGraph(2, [(0, 1, (1, float("nan")))])
    with pytest.raises(GraphFormatError):
        MultiCostGraph(2, [(0, 1, (1,)), (1, 0, (1, 2))])
