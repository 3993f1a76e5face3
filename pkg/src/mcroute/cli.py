"""Command-line entry point: ``mcroute gen|partition|build-index|query|bench``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 no path found.
Results go to stdout, diagnostics to stderr. ``--format csv`` and
``--format json`` output carries no timings, so reruns with the same
seeds print identical bytes (``bench`` is the exception; timing is its
payload).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Sequence

from .bench import BenchConfigError, load_config, run_benchmark
from .graph import (
    GraphFormatError, generate_density_graph, generate_grid_graph, generate_random_graph,
    generate_road_graph, load_graph, save_graph,
)
from .index import IndexFormatError, build_index, index_sizes, load_index, save_index
from .partition import PartitionError, load_partition, partition_graph, save_partition
from .query import query_optimal
from .scoring import ScoreFunctionError, register_score_function
from .skyline import SkylineLimitExceeded

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NO_PATH = 0, 1, 2, 3
THREADS_ENV = "MCROUTE_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _emit(rows: list[dict], fmt: str, out) -> None:
    if not rows:
        return
    if fmt == "csv":
        writer = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    elif fmt == "json":
        for row in rows:
            out.write(json.dumps(row, sort_keys=True) + "\n")
    else:
        for row in rows:
            out.write("\n".join(f"{k}: {v}" for k, v in row.items()) + "\n")
            if len(rows) > 1:
                out.write("\n")


def _vec(cost) -> str:
    return " ".join(str(x) for x in cost)


# --- subcommands ------------------------------------------------------------------


def cmd_gen(args, out) -> int:
    cost_range = (args.cost_min, args.cost_max)
    if args.kind == "random":
        if args.m is None:
            raise UsageError("gen --kind random needs --m")
        g = generate_random_graph(args.n, args.m, args.d, cost_range, args.seed)
    elif args.kind == "density":
        g = generate_density_graph(args.n, args.density, args.d, cost_range, args.seed)
    elif args.kind == "grid":
        if args.m is None:
            raise UsageError("gen --kind grid needs --m")
        g = generate_grid_graph(args.n, args.m, args.d, cost_range, args.seed, args.correlation)
    else:
        g = generate_road_graph(args.n, args.link_ratio, args.d, cost_range, args.seed, args.correlation)
    save_graph(g, args.out)
    _emit([{"graph": args.out, "n": g.n, "m": g.m, "d": g.d, "hash": g.content_hash()[:16]}], args.format, out)
    return EXIT_OK


def cmd_partition(args, out) -> int:
    g = load_graph(args.graph, on_duplicate=args.on_duplicate)
    layout = partition_graph(g, args.k, args.seed)
    save_partition(layout, args.out)
    sizes = layout.sizes()
    _emit([{
        "partition": args.out, "k": layout.k, "cut_edges": layout.cut_edges,
        "entries": len(layout.all_entries), "exits": len(layout.all_exits),
        "borders": len(layout.borders), "min_size": min(sizes), "max_size": max(sizes),
    }], args.format, out)
    return EXIT_OK


def cmd_build_index(args, out) -> int:
    g = load_graph(args.graph, on_duplicate=args.on_duplicate)
    layout = load_partition(args.partition, g) if args.partition else None
    index = build_index(g, args.k, args.r, args.seed, layout=layout, max_skyline=args.max_skyline)
    sizes = save_index(index, args.out)
    timings = index.build_meta["timings"]
    for phase, secs in timings.items():
        print(f"[build-index] {phase}: {secs:.3f}s", file=sys.stderr)
    row = {
        "index": args.out, "k": index.k, "r": index.r, "borders": len(index.layout.borders),
        "skyline_pairs": index.skyline.pair_count, "skyline_paths": len(index.skyline.path_label),
    }
    row.update({f"bytes_{k}": v for k, v in sizes.items()})
    row["bytes_total"] = sum(sizes.values())
    _emit([row], args.format, out)
    return EXIT_OK


def _read_pairs(path: str) -> list[tuple[int, int]]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphFormatError("expected 's e'", lineno)
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise GraphFormatError(f"bad vertex id in {line!r}", lineno) from None
    return pairs


def cmd_query(args, out) -> int:
    if args.pairs is None and (args.source is None or args.target is None):
        raise UsageError("query needs --from and --to, or --pairs")
    g = load_graph(args.graph, on_duplicate=args.on_duplicate)
    index = load_index(args.index, g)
    f = register_score_function(args.score, g.d)
    pairs = _read_pairs(args.pairs) if args.pairs else [(args.source, args.target)]
    for s, e in pairs:
        if not (0 <= s < g.n and 0 <= e < g.n):
            raise GraphFormatError(f"query vertex outside [0,{g.n}): {s} {e}")
    rows, missing = [], 0
    fmt = args.format if args.format != "human" or not args.pairs else "csv"
    for s, e in pairs:
        res = query_optimal(index, g, s, e, f)
        st = res.stats
        if not res.found:
            missing += 1
            rows.append({"source": s, "target": e, "status": "NO PATH", "score": "", "cost": "", "path": "",
                         "expanded": st.expanded, "filtered": st.filtered_vertices})
            continue
        rows.append({
            "source": s, "target": e, "status": "OK", "score": res.score, "cost": _vec(res.cost),
            "path": _vec(res.path.vertices), "expanded": st.expanded, "filtered": st.filtered_vertices,
        })
        if fmt == "human":
            print(f"[query] {s}->{e} in {st.wall_time:.4f}s", file=sys.stderr)
    _emit(rows, fmt, out)
    return EXIT_NO_PATH if missing else EXIT_OK


def cmd_bench(args, out) -> int:
    config = load_config(args.config)
    base = os.path.dirname(os.path.abspath(args.config))
    log = (lambda msg: print(f"[bench] {msg}", file=sys.stderr))
    report = run_benchmark(config, base_dir=base, log=log)
    text = report.to_csv() if args.format == "csv" else report.to_table() + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    out.write(text)
    return EXIT_OK


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("human", "csv", "json"), default="human")
    common.add_argument("--seed", type=int, default=0)

    graph_opts = _Parser(add_help=False)
    graph_opts.add_argument("--graph", required=True, help="edge-list graph file")
    graph_opts.add_argument("--on-duplicate", choices=("error", "keep_first"), default="error")

    parser = _Parser(prog="mcroute", description="Partition-index optimal routes on multi-cost graphs.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a synthetic graph")
    p.add_argument("--kind", choices=("random", "density", "grid", "road"), default="random")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--density", type=float, default=0.2)
    p.add_argument("--link-ratio", type=float, default=1.2)
    p.add_argument("--correlation", type=float, default=0.0, help="grid/road only: share of a common per-edge base cost")
    p.add_argument("--cost-min", type=int, default=1)
    p.add_argument("--cost-max", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_gen)

    p = sub.add_parser("partition", parents=[common, graph_opts], help="k-way partition a graph")
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_partition)

    p = sub.add_parser("build-index", parents=[common, graph_opts], help="build and save the index")
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--r", type=int, default=8)
    p.add_argument("--partition", help="use this partition file instead of partitioning")
    p.add_argument("--max-skyline", type=int, default=None)
    p.add_argument("--threads", type=int, default=int(os.environ.get(THREADS_ENV, "1")),
                   help=f"worker count (default from ${THREADS_ENV}); construction currently runs in one thread")
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_build_index)

    p = sub.add_parser("query", parents=[common, graph_opts], help="optimal-path query")
    p.add_argument("--index", required=True)
    p.add_argument("--from", dest="source", type=int)
    p.add_argument("--to", dest="target", type=int)
    p.add_argument("--pairs", help="file with one 's e' pair per line")
    p.add_argument("--score", default="sum_sq")
    p.set_defaults(run=cmd_query)

    p = sub.add_parser("bench", parents=[common], help="run a benchmark config (TOML)")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="also write the CSV report here")
    p.set_defaults(run=cmd_bench)
    return parser


def dispatch(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "k", 1) is not None and getattr(args, "k", 1) < 1:
            raise UsageError("--k must be >= 1")
        if getattr(args, "r", 1) < 1:
            raise UsageError("--r must be >= 1")
        return args.run(args, out)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (GraphFormatError, PartitionError, IndexFormatError, ScoreFunctionError,
            SkylineLimitExceeded, BenchConfigError, OSError, ValueError, KeyError) as exc:
        print(f"mcroute: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
