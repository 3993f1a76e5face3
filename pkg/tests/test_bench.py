import io

import pytest

from mcroute.bench import COLUMNS, BenchConfigError, load_config, make_graph, run_benchmark, sample_pairs
from mcroute.graph import generate_random_graph, save_graph


def test_sample_pairs_are_seeded_and_distinct():
    g = generate_random_graph(20, 60, 2, seed=0)
    a = sample_pairs(g, 30, 4)
    assert a == sample_pairs(g, 30, 4) and len(a) == 30
    assert all(s != e for s, e in a)


def test_make_graph_from_file_and_generators(tmp_path):
    g = generate_random_graph(20, 60, 2, seed=0)
    save_graph(g, tmp_path / "g.txt")
    name, again = make_graph({"file": "g.txt"}, str(tmp_path))
    assert name == "g.txt" and again.content_hash() == g.content_hash()
    _, road = make_graph({"generator": "road", "n": 300, "correlation": 0.4, "seed": 2})
    assert road.n == 300
    with pytest.raises(BenchConfigError):
        make_graph({"generator": "lattice", "n": 10})


def test_run_reports_every_combination_without_mismatches():
    config = load_config(io.StringIO(
        '[bench]\npairs = 4\nseed = 1\ntimeout = 1e-9\n'
        '[[graphs]]\ngenerator = "grid"\nn = 400\nm = 1600\nk = [4, 8]\nr = [1, 3]\n'
    ))
    report = run_benchmark(config)
    methods = [row["method"] for row in report.rows]
    assert methods.count("bf-search") == 1 and methods.count("index") == 4
    for row in report.rows:
        assert row["mismatches"] == 0 and row["timeouts"] == 4
    index_rows = [row for row in report.rows if row["method"] == "index"]
    assert all(0 <= row["filtered_fraction"] <= 1 and row["V_f"] <= row["V"] for row in index_rows)
    assert [k for k, _ in report.series("k")] == [4, 4, 8, 8]
    csv = report.to_csv().splitlines()
    assert csv[0] == ",".join(COLUMNS) and len(csv) == 6
    assert "filtered_fraction" in report.to_table()


@pytest.mark.parametrize("text, fragment", [
    ("[bench]\npairs = 1\n", "no graphs"),
    ('[bench]\nmethods = ["magic"]\n[[graphs]]\ngenerator = "grid"\nn = 100\nm = 400\n', "unknown method"),
])
def test_config_errors(text, fragment):
    with pytest.raises(BenchConfigError, match=fragment):
        run_benchmark(load_config(io.StringIO(text)))
