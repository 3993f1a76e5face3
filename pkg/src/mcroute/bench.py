"""Benchmark harness: query times, index sizes and filtering effect.

A run takes a config (usually parsed from TOML) listing graphs, a k-sweep,
an r-sweep and the methods to compare. Every query pair is answered by
every method and the scores are cross-checked. Columns of the CSV:

``method, dataset, n, m, d, k, r, pairs, mean_query_time, index_size_bytes,
build_time, V, E, V_f, E_f, filtered_fraction, avg_SP, timeouts, mismatches``

``V``/``E`` are shrunk-graph sizes and ``V_f``/``E_f`` the sizes after vertex
filtering, averaged over pairs (blank for methods without a shrunk graph).
"""

from __future__ import annotations

import csv
import io
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .graph import (
    MultiCostGraph, generate_density_graph, generate_grid_graph, generate_random_graph,
    generate_road_graph, load_graph,
)
from .index import build_index, index_sizes
from .oracle import bf_search_baseline
from .query import QueryResult, build_shrunk_graph, query_optimal, shrunk_graph_stats, vertex_filter
from .scoring import register_score_function

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

COLUMNS = [
    "method", "dataset", "n", "m", "d", "k", "r", "pairs", "mean_query_time",
    "index_size_bytes", "build_time", "V", "E", "V_f", "E_f", "filtered_fraction",
    "avg_SP", "timeouts", "mismatches",
]
METHODS = ("index", "bf-search")


class BenchConfigError(ValueError):
    pass


@dataclass
class BenchReport:
    rows: list[dict] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({c: _fmt(row.get(c)) for c in COLUMNS})
        return buf.getvalue()

    def to_table(self) -> str:
        cols = ["method", "dataset", "n", "d", "k", "r", "mean_query_time", "index_size_bytes",
                "V", "V_f", "filtered_fraction", "avg_SP", "mismatches"]
        cells = [cols] + [[_fmt(row.get(c)) for c in cols] for row in self.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(cols))]
        lines = ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines)

    def series(self, key: str, method: str = "index") -> list[tuple]:
        """``(key value, mean query time)`` points, e.g. the k-sweep."""
        return sorted(
            (row[key], row["mean_query_time"]) for row in self.rows if row["method"] == method
        )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def load_config(source) -> dict:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return tomllib.load(fh)
    return tomllib.loads(source.read())


def make_graph(spec: dict, base_dir: str = ".") -> tuple[str, MultiCostGraph]:
    """Graph from a config entry: ``file = path`` or ``generator = kind`` with
    its parameters."""
    if "file" in spec:
        path = os.path.join(base_dir, spec["file"])
        return spec.get("name", os.path.basename(path)), load_graph(path)
    kind = spec.get("generator")
    seed = int(spec.get("seed", 0))
    d = int(spec.get("d", 2))
    cost_range = tuple(spec.get("cost_range", (1, 10)))
    n = int(spec["n"])
    rho = float(spec.get("correlation", 0.0))
    if kind == "random":
        g = generate_random_graph(n, int(spec["m"]), d, cost_range, seed)
    elif kind == "density":
        g = generate_density_graph(n, float(spec["density"]), d, cost_range, seed)
    elif kind == "grid":
        g = generate_grid_graph(n, int(spec["m"]), d, cost_range, seed, rho)
    elif kind == "road":
        g = generate_road_graph(n, float(spec.get("link_ratio", 1.2)), d, cost_range, seed, rho)
    else:
        raise BenchConfigError(f"unknown generator {kind!r}")
    return spec.get("name", f"{kind}-{n}"), g


def sample_pairs(g: MultiCostGraph, count: int, seed: int) -> list[tuple[int, int]]:
    rng = np.random.default_rng(seed)
    pairs = []
    while len(pairs) < count:
        s, e = (int(x) for x in rng.integers(0, g.n, size=2))
        if s != e:
            pairs.append((s, e))
    return pairs


def run_benchmark(config: dict, *, base_dir: str = ".", log=None) -> BenchReport:
    """Run every (graph, k, r, method) combination of ``config``.

    Recognised keys: ``pairs`` (default 100), ``seed``, ``score``
    (default ``sum_sq``), ``methods``, ``timeout`` (seconds per query;
    slower queries are counted, not fatal), ``k``, ``r`` and a ``graphs``
    list whose entries may override ``k``/``r``.
    """
    bench = dict(config.get("bench", {}))
    graphs = config.get("graphs") or []
    if not graphs:
        raise BenchConfigError("config lists no graphs")
    n_pairs = int(bench.get("pairs", 100))
    seed = int(bench.get("seed", 0))
    score = bench.get("score", "sum_sq")
    methods = _as_list(bench.get("methods", list(METHODS)))
    for mth in methods:
        if mth not in METHODS:
            raise BenchConfigError(f"unknown method {mth!r}")
    timeout = bench.get("timeout")
    report = BenchReport()
    for gspec in graphs:
        name, g = make_graph(gspec, base_dir)
        f = register_score_function(score, g.d)
        pairs = sample_pairs(g, n_pairs, seed)
        reference: dict[tuple, float] = {}
        if "bf-search" in methods:
            times, outs = _timed(lambda s, e: bf_search_baseline(g, s, e, f), pairs)
            reference = {p: o.score for p, o in zip(pairs, outs)}
            report.rows.append(dict(
                method="bf-search", dataset=name, n=g.n, m=g.m, d=g.d, pairs=len(pairs),
                mean_query_time=float(np.mean(times)),
                timeouts=_count_slow(times, timeout), mismatches=0,
            ))
        if "index" not in methods:
            continue
        for k in _as_list(gspec.get("k", bench.get("k", 50))):
            for r in _as_list(gspec.get("r", bench.get("r", 8))):
                t0 = time.perf_counter()
                index = build_index(g, int(k), int(r), seed)
                build_time = time.perf_counter() - t0
                size = index_sizes(index)["total"]
                times, outs = _timed(lambda s, e: query_optimal(index, g, s, e, f), pairs)
                shape = [_shrunk_shape(index, g, s, e, f) for s, e in pairs]
                mism = sum(1 for p, o in zip(pairs, outs) if p in reference and o.score != reference[p])
                counts = np.diff(index.skyline.pair_start)
                row = dict(
                    method="index", dataset=name, n=g.n, m=g.m, d=g.d, k=int(k), r=int(r),
                    pairs=len(pairs), mean_query_time=float(np.mean(times)),
                    index_size_bytes=size, build_time=build_time,
                    avg_SP=float(counts.mean()) if len(counts) else 0.0,
                    timeouts=_count_slow(times, timeout), mismatches=mism,
                )
                for key in ("V", "E", "V_f", "E_f"):
                    row[key] = float(np.mean([sh[key] for sh in shape if key in sh] or [0]))
                row["filtered_fraction"] = float(np.mean(
                    [1 - sh["V_f"] / sh["V"] for sh in shape if "V_f" in sh] or [0]
                ))
                report.rows.append(row)
                if log:
                    log(f"{name} k={k} r={r}: {row['mean_query_time']:.4f}s/query")
    return report


def _shrunk_shape(index, g, s, e, f) -> dict:
    shrunk = build_shrunk_graph(index, g, s, e)
    return shrunk_graph_stats(shrunk, vertex_filter(shrunk, index, s, e, f))


def _timed(fn, pairs) -> tuple[list[float], list[QueryResult]]:
    times, outs = [], []
    for s, e in pairs:
        t0 = time.perf_counter()
        outs.append(fn(s, e))
        times.append(time.perf_counter() - t0)
    return times, outs


def _count_slow(times, timeout) -> int:
    if timeout is None:
        return 0
    return sum(1 for t in times if t > float(timeout))
