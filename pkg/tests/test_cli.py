import io
import json

import pytest

from mcroute.cli import EXIT_DATA, EXIT_NO_PATH, EXIT_OK, EXIT_USAGE, dispatch


def run(*argv):
    out = io.StringIO()
    code = dispatch([str(a) for a in argv], out)
    return code, out.getvalue()


@pytest.fixture()
def workdir(tmp_path):
    graph = tmp_path / "g.txt"
    code, _ = run("gen", "--kind", "grid", "--n", 400, "--m", 1600, "--seed", 1, "--out", graph)
    assert code == EXIT_OK
    return tmp_path


def test_full_pipeline_is_reproducible(workdir):
    graph, part, idx = workdir / "g.txt", workdir / "g.part", workdir / "g.idx"
    code, out = run("partition", "--graph", graph, "--k", 4, "--out", part, "--format", "json")
    assert code == EXIT_OK and json.loads(out)["k"] == 4
    code, out = run("build-index", "--graph", graph, "--partition", part, "--r", 3, "--out", idx,
                    "--format", "json")
    row = json.loads(out)
    assert code == EXIT_OK and row["bytes_total"] == idx.stat().st_size
    pairs = workdir / "pairs.txt"
    pairs.write_text("# s e\n0 399\n17 250\n\n5 5\n")
    first = run("query", "--graph", graph, "--index", idx, "--pairs", pairs, "--format", "csv")
    again = run("query", "--graph", graph, "--index", idx, "--pairs", pairs, "--format", "csv")
    assert first == again and first[0] == EXIT_OK
    lines = first[1].strip().splitlines()
    assert lines[0].startswith("source,target,status,score") and len(lines) == 4
    assert all(",OK," in line for line in lines[1:])


def test_single_query_human_output(workdir):
    graph, idx = workdir / "g.txt", workdir / "g.idx"
    assert run("build-index", "--graph", graph, "--k", 4, "--r", 2, "--out", idx)[0] == EXIT_OK
    code, out = run("query", "--graph", graph, "--index", idx, "--from", 3, "--to", 300, "--score", "sum_cube")
    assert code == EXIT_OK and "status: OK" in out and "path: 3 " in out


def test_no_path_exit_code(tmp_path):
    graph, idx = tmp_path / "g.txt", tmp_path / "g.idx"
    graph.write_text("4 2 2\n0 1 1 1\n2 3 1 1\n")
    assert run("build-index", "--graph", graph, "--k", 2, "--r", 1, "--out", idx)[0] == EXIT_OK
    code, out = run("query", "--graph", graph, "--index", idx, "--from", 0, "--to", 3)
    assert code == EXIT_NO_PATH and "NO PATH" in out


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["gen", "--n", 10, "--out", "x"],
    ["gen", "--kind", "grid", "--n", 10, "--out", "x"],
    ["partition", "--graph", "g.txt", "--k", 0, "--out", "p"],
    ["build-index", "--graph", "g.txt", "--r", 0, "--out", "i"],
    ["query", "--graph", "g.txt", "--index", "i"],
])
def test_usage_errors(workdir, monkeypatch, argv):
    monkeypatch.chdir(workdir)
    assert run(*argv)[0] == EXIT_USAGE


def test_data_errors(workdir, tmp_path):
    graph, idx = workdir / "g.txt", workdir / "g.idx"
    bad = tmp_path / "bad.txt"
    bad.write_text("2 1 2\n0 1 1\n")
    assert run("partition", "--graph", bad, "--out", tmp_path / "p")[0] == EXIT_DATA
    assert run("partition", "--graph", tmp_path / "missing.txt", "--out", tmp_path / "p")[0] == EXIT_DATA
    run("build-index", "--graph", graph, "--k", 4, "--r", 2, "--out", idx)
    other = tmp_path / "other.txt"
    run("gen", "--kind", "grid", "--n", 400, "--m", 1600, "--seed", 2, "--out", other)
    assert run("query", "--graph", other, "--index", idx, "--from", 0, "--to", 1)[0] == EXIT_DATA
    assert run("query", "--graph", graph, "--index", idx, "--from", 0, "--to", 1, "--score", "nope")[0] == EXIT_DATA
    assert run("query", "--graph", graph, "--index", idx, "--from", 0, "--to", 999)[0] == EXIT_DATA
    idx.write_bytes(idx.read_bytes()[:-3])
    assert run("query", "--graph", graph, "--index", idx, "--from", 0, "--to", 1)[0] == EXIT_DATA


def test_bench_subcommand(tmp_path):
    cfg = tmp_path / "bench.toml"
    cfg.write_text(
        '[bench]\npairs = 3\nscore = "sum_sq"\n\n'
        '[[graphs]]\nname = "tiny"\ngenerator = "grid"\nn = 225\nm = 900\nk = [3, 5]\nr = 2\n'
    )
    code, out = run("bench", "--config", cfg, "--format", "csv", "--out", tmp_path / "r.csv")
    assert code == EXIT_OK
    rows = out.strip().splitlines()
    assert rows[0].startswith("method,dataset") and len(rows) == 4
    assert (tmp_path / "r.csv").read_text() == out
