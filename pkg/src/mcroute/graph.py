"""Multi-cost directed graphs: data model, text I/O, generators and subgraphs.

A graph carries one non-negative cost vector of fixed dimension ``d`` per
edge. Cost vectors are plain tuples throughout the package; integral inputs
stay Python ints so that path costs and scores compare exactly.
"""

from __future__ import annotations

import hashlib
import io
import math
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence, Union

import numpy as np

CostVector = tuple
INF = math.inf


class GraphFormatError(ValueError):
    """Raised for malformed or contract-violating graph input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def zero_vector(d: int) -> CostVector:
    return (0,) * d


def inf_vector(d: int) -> CostVector:
    return (INF,) * d


def add_costs(a: CostVector, b: CostVector) -> CostVector:
    return tuple(x + y for x, y in zip(a, b))


def weakly_dominates(a: CostVector, b: CostVector) -> bool:
    """``a <= b`` in every component."""
    return all(x <= y for x, y in zip(a, b))


class MultiCostGraph:
    """Immutable simple directed graph with a cost vector on every edge.

    Vertices are dense ids ``0..n-1``. ``costs`` is an ``(m, d)`` array
    (int64 for integral graphs, float64 otherwise); ``out_adj[u]`` and
    ``in_adj[v]`` hold ``(neighbour, cost_tuple)`` pairs sorted by neighbour.
    """

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int, Sequence[float]]],
        d: int | None = None,
        *,
        origin: Sequence[int] | None = None,
        labels: Sequence[str] | None = None,
    ):
        edges = list(edges)
        if d is None:
            if not edges:
                raise GraphFormatError("cannot infer dimensionality of an edgeless graph")
            d = len(edges[0][2])
        if d < 1:
            raise GraphFormatError("dimensionality must be >= 1")
        if n < 0:
            raise GraphFormatError("vertex count must be non-negative")
        integral = all(
            isinstance(c, (int, np.integer)) or (isinstance(c, float) and c.is_integer())
            for _, _, cost in edges
            for c in cost
        )
        seen: set[tuple[int, int]] = set()
        clean = []
        for u, v, cost in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u},{v}) references an unknown vertex")
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            if (u, v) in seen:
                raise GraphFormatError(f"duplicate edge ({u},{v})")
            if len(cost) != d:
                raise GraphFormatError(f"edge ({u},{v}) has {len(cost)} costs, expected {d}")
            if any(c < 0 or c != c for c in cost):
                raise GraphFormatError(f"edge ({u},{v}) has a negative or NaN cost")
            seen.add((u, v))
            cost = tuple(int(c) for c in cost) if integral else tuple(float(c) for c in cost)
            clean.append((u, v, cost))
        clean.sort(key=lambda e: (e[0], e[1]))

        self.n = n
        self.d = d
        self.integral = integral
        self.src = np.array([e[0] for e in clean], dtype=np.int64)
        self.dst = np.array([e[1] for e in clean], dtype=np.int64)
        self.costs = np.array(
            [e[2] for e in clean], dtype=np.int64 if integral else np.float64
        ).reshape(len(clean), d)
        self.out_adj: list[list[tuple[int, CostVector]]] = [[] for _ in range(n)]
        self.in_adj: list[list[tuple[int, CostVector]]] = [[] for _ in range(n)]
        self.edge_cost: dict[tuple[int, int], CostVector] = {}
        for u, v, cost in clean:
            self.out_adj[u].append((v, cost))
            self.edge_cost[(u, v)] = cost
        for u, v, cost in sorted(clean, key=lambda e: (e[1], e[0])):
            self.in_adj[v].append((u, cost))
        self.origin = None if origin is None else np.asarray(origin, dtype=np.int64)
        self.labels = None if labels is None else list(labels)
        self.duplicates = 0
        self._cache: dict = {}  # csr matrices per (dimension, reverse), content hash

    @property
    def m(self) -> int:
        return len(self.src)

    def edges(self):
        for u in range(self.n):
            for v, cost in self.out_adj[u]:
                yield u, v, cost

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edge_cost

    def csr(self, dimension: int, reverse: bool = False):
        """Sparse adjacency matrix of one cost dimension (cached)."""
        key = (dimension, reverse)
        if key not in self._cache:
            import scipy.sparse as sp

            rows, cols = (self.dst, self.src) if reverse else (self.src, self.dst)
            self._cache[key] = sp.csr_matrix(
                (self.costs[:, dimension].astype(np.float64), (rows, cols)),
                shape=(self.n, self.n),
            )
        return self._cache[key]

    def content_hash(self) -> str:
        cached = self._cache.get("hash")
        if cached is not None:
            return cached
        h = hashlib.sha256()
        h.update(f"{self.n} {self.d} {int(self.integral)}".encode())
        h.update(self.src.astype("<i8").tobytes())
        h.update(self.dst.astype("<i8").tobytes())
        h.update(self.costs.astype("<i8" if self.integral else "<f8").tobytes())
        self._cache["hash"] = h.hexdigest()
        return self._cache["hash"]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiCostGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.d == other.d
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.costs, other.costs)
        )

    def __repr__(self) -> str:
        return f"MultiCostGraph(n={self.n}, m={self.m}, d={self.d})"


@dataclass(frozen=True)
class Path:
    vertices: tuple[int, ...]
    cost: CostVector

    def __len__(self) -> int:
        return len(self.vertices)


def path_cost(g: MultiCostGraph, vertices: Sequence[int]) -> CostVector:
    cost = zero_vector(g.d) if g.integral else (0.0,) * g.d
    for u, v in zip(vertices, vertices[1:]):
        try:
            cost = add_costs(cost, g.edge_cost[(u, v)])
        except KeyError:
            raise ValueError(f"({u},{v}) is not an edge") from None
    return cost


def make_path(g: MultiCostGraph, vertices: Sequence[int]) -> Path:
    """Build a validated simple path from a vertex sequence."""
    vertices = tuple(int(v) for v in vertices)
    if not vertices:
        raise ValueError("a path needs at least one vertex")
    if len(set(vertices)) != len(vertices):
        raise ValueError("path repeats a vertex")
    return Path(vertices, path_cost(g, vertices))


def erase_loops(vertices: Sequence[int]) -> tuple[int, ...]:
    """Turn a walk into a simple path by cutting every closed sub-walk."""
    out: list[int] = []
    where: dict[int, int] = {}
    for v in vertices:
        if v in where:
            cut = where[v]
            for w in out[cut + 1:]:
                del where[w]
            del out[cut + 1:]
        else:
            where[v] = len(out)
            out.append(v)
    return tuple(out)


# --- text format -----------------------------------------------------------

Source = Union[str, bytes, os.PathLike, IO]


def _open_text(source: Source) -> IO[str]:
    if isinstance(source, bytes):
        return io.StringIO(source.decode())
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8")
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8")


def _number(tok: str, lineno: int):
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        value = float(tok)
    except ValueError:
        raise GraphFormatError(f"not a number: {tok!r}", lineno) from None
    if not math.isfinite(value):
        raise GraphFormatError(f"non-finite cost {tok!r}", lineno)
    return value


def load_graph(source: Source, *, on_duplicate: str = "error") -> MultiCostGraph:
    """Parse the edge-list text format.

    Header ``n m d [directed|undirected]`` followed by ``m`` lines
    ``u v w1 .. wd``; ``#`` starts a comment. Undirected edges become two
    directed edges. ``on_duplicate="keep_first"`` collapses repeated pairs
    instead of failing; the number dropped is stored in ``g.duplicates``.
    """
    if on_duplicate not in ("error", "keep_first"):
        raise ValueError("on_duplicate must be 'error' or 'keep_first'")
    stream = _open_text(source)
    close = isinstance(source, (str, os.PathLike))
    try:
        lines = [
            (i, line.split("#", 1)[0].split())
            for i, line in enumerate(stream, start=1)
        ]
    finally:
        if close:
            stream.close()
    lines = [(i, toks) for i, toks in lines if toks]
    if not lines:
        raise GraphFormatError("empty input")
    hline, header = lines[0]
    if len(header) not in (3, 4):
        raise GraphFormatError("header must be 'n m d [directed|undirected]'", hline)
    try:
        n, m, d = (int(t) for t in header[:3])
    except ValueError:
        raise GraphFormatError("header counts must be integers", hline) from None
    directed = True
    if len(header) == 4:
        if header[3] not in ("directed", "undirected"):
            raise GraphFormatError(f"unknown orientation {header[3]!r}", hline)
        directed = header[3] == "directed"
    if n < 0 or m < 0 or d < 1:
        raise GraphFormatError("invalid header counts", hline)
    body = lines[1:]
    if len(body) != m:
        raise GraphFormatError(f"header declares {m} edges, found {len(body)}", hline)

    edges = []
    where: dict[tuple[int, int], int] = {}
    dropped = 0
    for lineno, toks in body:
        if len(toks) != 2 + d:
            raise GraphFormatError(f"expected {2 + d} fields, got {len(toks)}", lineno)
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise GraphFormatError("vertex ids must be integers", lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex id out of range [0,{n})", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        cost = tuple(_number(t, lineno) for t in toks[2:])
        if any(c < 0 for c in cost):
            raise GraphFormatError("negative cost", lineno)
        pairs = [(u, v)] if directed else [(u, v), (v, u)]
        for pair in pairs:
            if pair in where:
                if on_duplicate == "error":
                    raise GraphFormatError(
                        f"duplicate edge {pair} (first on line {where[pair]})", lineno
                    )
                dropped += 1
                continue
            where[pair] = lineno
            edges.append((pair[0], pair[1], cost))
    g = MultiCostGraph(n, edges, d)
    g.duplicates = dropped
    return g


def format_graph(g: MultiCostGraph) -> str:
    """Canonical text form: directed header, edges sorted by (u, v)."""
    out = [f"{g.n} {g.m} {g.d} directed"]
    for u, v, cost in g.edges():
        out.append(" ".join([str(u), str(v), *(repr(c) if isinstance(c, float) else str(c) for c in cost)]))
    return "\n".join(out) + "\n"


def save_graph(g: MultiCostGraph, sink: Union[str, os.PathLike, IO[str]]) -> None:
    text = format_graph(g)
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sink.write(text)


# --- generators ------------------------------------------------------------


def _draw_costs(
    rng: np.random.Generator, count: int, d: int, cost_range, correlation: float = 0.0
) -> np.ndarray:
    """Integer costs in ``cost_range``. With ``correlation`` rho > 0 each
    component is ``round(rho * base + (1 - rho) * own)`` for a base value
    shared by the edge's components and an independent draw ``own``."""
    lo, hi = cost_range
    if lo < 0 or hi < lo:
        raise ValueError(f"invalid cost range {cost_range}")
    if not 0.0 <= correlation <= 1.0:
        raise ValueError(f"correlation must lie in [0, 1], got {correlation}")
    if correlation == 0.0:
        return rng.integers(lo, hi + 1, size=(count, d))
    base = rng.uniform(lo, hi, size=(count, 1))
    own = rng.uniform(lo, hi, size=(count, d))
    return np.rint(correlation * base + (1 - correlation) * own).astype(np.int64)


def generate_random_graph(
    n: int, m: int, d: int, cost_range: tuple[int, int] = (1, 10), seed: int = 0
) -> MultiCostGraph:
    """Uniform random simple digraph with exactly ``m`` edges and integer costs."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    if m < 0 or m > n * (n - 1):
        raise ValueError(f"infeasible edge count {m}: at most {n * (n - 1)} for n={n}")
    rng = np.random.default_rng(seed)
    total = n * (n - 1)
    if m > total // 4:
        codes = rng.permutation(total)[:m]
    else:
        chosen: dict[int, None] = {}
        while len(chosen) < m:
            for c in rng.integers(0, total, size=m - len(chosen)):
                chosen.setdefault(int(c))
                if len(chosen) == m:
                    break
        codes = np.fromiter(chosen, dtype=np.int64, count=m)
    # code -> (u, v) with v != u
    u = codes // (n - 1) if n > 1 else codes
    v = codes % (n - 1) if n > 1 else codes
    v = v + (v >= u)
    costs = _draw_costs(rng, m, d, cost_range)
    return MultiCostGraph(
        n, ((int(a), int(b), tuple(int(c) for c in row)) for a, b, row in zip(u, v, costs)), d
    )


def generate_density_graph(
    n: int, density: float, d: int, cost_range=(1, 10), seed: int = 0
) -> MultiCostGraph:
    """Random graph whose edge count is ``round(density * n * (n - 1))``."""
    return generate_random_graph(n, int(round(density * n * (n - 1))), d, cost_range, seed)


def generate_grid_graph(
    n: int, m: int, d: int, cost_range=(1, 10), seed: int = 0, correlation: float = 0.0
) -> MultiCostGraph:
    """Road-like grid: bidirectional 4-neighbour lattice plus random diagonals.

    Both directions of an undirected link get their own cost draw; see
    ``_draw_costs`` for ``correlation``. Diagonal links are added (or
    lattice links dropped) until exactly ``m`` directed edges remain, so
    ``m`` must be even.
    """
    if m % 2:
        raise ValueError("grid graphs are bidirectional; m must be even")
    rng = np.random.default_rng(seed)
    width = int(math.ceil(math.sqrt(n)))
    links: list[tuple[int, int]] = []
    for v in range(n):
        r, c = divmod(v, width)
        if c + 1 < width and v + 1 < n:
            links.append((v, v + 1))
        if v + width < n:
            links.append((v, v + width))
    want = m // 2
    if want < len(links):
        keep = np.sort(rng.permutation(len(links))[:want])
        links = [links[i] for i in keep]
    else:
        have = set(links)
        diagonals = []
        for v in range(n):
            r, c = divmod(v, width)
            if c + 1 < width and v + width + 1 < n:
                diagonals.append((v, v + width + 1))
            if c > 0 and v + width - 1 < n:
                diagonals.append((v, v + width - 1))
        need = want - len(links)
        if need > len(diagonals):
            raise ValueError(f"infeasible edge count {m} for a grid of {n} vertices")
        for i in np.sort(rng.permutation(len(diagonals))[:need]):
            if diagonals[i] not in have:
                links.append(diagonals[i])
    costs = _draw_costs(rng, 2 * len(links), d, cost_range, correlation)
    edges = []
    for i, (a, b) in enumerate(links):
        edges.append((a, b, tuple(int(x) for x in costs[2 * i])))
        edges.append((b, a, tuple(int(x) for x in costs[2 * i + 1])))
    return MultiCostGraph(n, edges, d)


def generate_road_graph(
    n: int, link_ratio: float = 1.2, d: int = 2, cost_range=(1, 10), seed: int = 0,
    correlation: float = 0.0,
) -> MultiCostGraph:
    """Sparse planar-ish road network with about ``link_ratio * n`` two-way links.

    Points are scattered in the unit square; each point links to its nearest
    earlier point (a spanning tree), and the remaining links join nearest
    unlinked neighbour pairs.
    """
    from scipy.spatial import cKDTree

    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    tree = cKDTree(pts)
    links: set[tuple[int, int]] = set()
    k = min(n, 16)
    _, nbrs = tree.query(pts, k=k)
    nbrs = np.atleast_2d(nbrs)
    order = rng.permutation(n)
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    for v in order[1:]:
        # nearest already-placed point; fall back to a global scan
        cand = [int(w) for w in nbrs[v][1:] if rank[w] < rank[v]]
        if cand:
            w = cand[0]
        else:
            placed = order[: rank[v]]
            w = int(placed[np.argmin(((pts[placed] - pts[v]) ** 2).sum(axis=1))])
        links.add((min(v, w), max(v, w)))
    target = int(round(link_ratio * n))
    for j in range(1, k):
        if len(links) >= target:
            break
        for v in rng.permutation(n):
            w = int(nbrs[v][j])
            links.add((min(v, w), max(v, w)))
            if len(links) >= target:
                break
    links = sorted(links)
    costs = _draw_costs(rng, 2 * len(links), d, cost_range, correlation)
    edges = []
    for i, (a, b) in enumerate(links):
        edges.append((a, b, tuple(int(x) for x in costs[2 * i])))
        edges.append((b, a, tuple(int(x) for x in costs[2 * i + 1])))
    return MultiCostGraph(n, edges, d)


def induced_subgraph(g: MultiCostGraph, subset: Iterable[int]) -> MultiCostGraph:
    """Subgraph on ``subset`` with ids remapped in ascending order.

    ``result.origin[local]`` is the id in ``g``; nested calls compose the
    table back to the parent's own origin when it has one.
    """
    members = sorted({int(v) for v in subset})
    for v in members:
        if not 0 <= v < g.n:
            raise ValueError(f"unknown vertex id {v}")
    local = {v: i for i, v in enumerate(members)}
    edges = [
        (local[u], local[v], cost)
        for u in members
        for v, cost in g.out_adj[u]
        if v in local
    ]
    origin = members if g.origin is None else [int(g.origin[v]) for v in members]
    return MultiCostGraph(len(members), edges, g.d, origin=origin)
