import io

import numpy as np
import pytest

from mcroute.graph import generate_grid_graph, generate_random_graph
from mcroute.partition import PartitionError, compute_borders, load_partition, partition_graph, save_partition


def _brute_borders(g, assignment):
    entries, exits = set(), set()
    for u, v, _ in g.edges():
        if assignment[u] != assignment[v]:
            exits.add(u)
            entries.add(v)
    return entries, exits


@pytest.mark.parametrize("k", [1, 2, 7, 20])
def test_partition_is_total_nonempty_and_borders_match(k):
    g = generate_random_graph(120, 400, 2, seed=k)
    lay = partition_graph(g, k, seed=1)
    assert lay.k == k
    assert sorted(np.concatenate(lay.members).tolist()) == list(range(g.n))
    assert all(len(m) for m in lay.members)
    entries, exits = _brute_borders(g, lay.assignment)
    assert set(lay.all_entries) == entries
    assert set(lay.all_exits) == exits
    assert set(lay.borders) == entries | exits
    assert lay.cut_edges == sum(lay.assignment[u] != lay.assignment[v] for u, v, _ in g.edges())


def test_partition_is_deterministic_per_seed():
    g = generate_grid_graph(900, 3600, 2, seed=0)
    a = partition_graph(g, 9, seed=3)
    b = partition_graph(g, 9, seed=3)
    assert np.array_equal(a.assignment, b.assignment)


def test_partition_cuts_far_fewer_edges_than_random_split():
    g = generate_grid_graph(2500, 10000, 2, seed=0)
    lay = partition_graph(g, 25, seed=0)
    rng = np.random.default_rng(0)
    random_cut = compute_borders(g, rng.integers(0, 25, size=g.n)).cut_edges
    assert lay.cut_edges < 0.2 * random_cut
    assert lay.stats["imbalance"] < 1.6


def test_partition_rejects_bad_k():
    g = generate_random_graph(10, 30, 2, seed=0)
    with pytest.raises(PartitionError):
        partition_graph(g, 0)
    with pytest.raises(PartitionError):
        partition_graph(g, 11)
    assert partition_graph(g, 10).k == 10


def test_partition_file_roundtrip_and_errors():
    g = generate_random_graph(15, 40, 2, seed=2)
    lay = partition_graph(g, 3)
    buf = io.StringIO()
    save_partition(lay, buf)
    again = load_partition(io.StringIO(buf.getvalue()), g)
    assert np.array_equal(again.assignment, lay.assignment)
    assert again.entries == lay.entries and again.exits == lay.exits
    with pytest.raises(PartitionError, match="expected 15 lines"):
        load_partition(io.StringIO("0\n" * 14), g)
    with pytest.raises(PartitionError, match="bad subset id"):
        load_partition(io.StringIO("x\n" * 15), g)
    with pytest.raises(PartitionError, match="out of range"):
        load_partition(io.StringIO("0\n" * 14 + "5\n"), g, k=3)
    with pytest.raises(PartitionError, match="empty"):
        load_partition(io.StringIO("0\n" * 14 + "2\n"), g)


def test_compute_borders_accepts_mapping_and_checks_totality():
    g = generate_random_graph(6, 12, 2, seed=1)
    lay = compute_borders(g, {v: v % 2 for v in range(6)})
    assert lay.k == 2
    with pytest.raises(PartitionError):
        compute_borders(g, {0: 0})
    with pytest.raises(PartitionError):
        compute_borders(g, [0, 1, 0])
