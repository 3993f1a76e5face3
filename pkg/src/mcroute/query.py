"""Optimal-path queries over a partition index.

A query from ``s`` to ``e`` runs on the shrunk graph: every vertex of the
two terminal subsets plus the border vertices of all other subsets. Edges
are the original edges inside the terminal subsets, every cross-subset
edge, and one multi-edge per skyline path for each entry-exit pair of the
other subsets. Vertex filtering drops shrunk-graph vertices whose LBOP
detour already scores above the best witness path, and a best-first
branch and bound then searches what is left.

The shrunk graph is never materialised during a query; adjacency is read
from the original graph and the index on demand.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left, bisect_right
import math
import operator
import time
from dataclasses import dataclass, field
from itertools import count

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .graph import INF, CostVector, MultiCostGraph, Path, erase_loops, path_cost, zero_vector
from .index import PartitionIndex
from .scoring import ScoreFunction

# relative slack when comparing float-evaluated bounds against tau, so that
# rounding can only keep a vertex, never drop one
FILTER_SLACK = 1e-12


@dataclass
class QueryStats:
    method: str = "index"
    expanded: int = 0
    generated: int = 0
    pruned_tau: int = 0
    pruned_dominance: int = 0
    pruned_contour: int = 0
    pruned_revisit: int = 0
    virtual_children: int = 0
    shrunk_vertices: int = 0
    shrunk_edges: int = 0
    surviving_vertices: int = 0
    surviving_edges: int = 0
    filtered_vertices: int = 0
    wall_time: float = 0.0

    @property
    def filtered_fraction(self) -> float:
        if not self.shrunk_vertices:
            return 0.0
        return 1.0 - self.surviving_vertices / self.shrunk_vertices


@dataclass
class QueryResult:
    path: Path | None
    cost: CostVector | None
    score: float
    stats: QueryStats = field(default_factory=QueryStats)

    @property
    def found(self) -> bool:
        return self.path is not None


def not_found(stats: QueryStats) -> QueryResult:
    return QueryResult(None, None, INF, stats)


# --- shrunk graph -------------------------------------------------------------


@dataclass(frozen=True)
class ShrunkEdge:
    """``tag`` is None for an original edge, otherwise ``(subset, entry,
    exit, skyline_index)`` of the skyline path the multi-edge stands for."""

    source: int
    target: int
    cost: CostVector
    tag: tuple | None = None


class ShrunkGraph:
    """Implicit shrunk graph for one query pair."""

    def __init__(self, index: PartitionIndex, g: MultiCostGraph, s: int, e: int):
        self.index = index
        self.g = g
        self.s, self.e = s, e
        eng = index.engine(g)
        self.ps, self.pe = int(eng.assign[s]), int(eng.assign[e])
        self.terminal = np.zeros(index.layout.k, dtype=bool)
        self.terminal[[self.ps, self.pe]] = True
        mask = eng.is_border.copy()
        for p in {self.ps, self.pe}:
            mask[index.layout.members[p]] = True
        self.mask = mask
        self._assign = eng._assign_list
        self._terminal = self.terminal.tolist()

    @property
    def vertices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def contains(self, v: int) -> bool:
        return bool(self.mask[v])

    def keeps_edge(self, u: int, v: int) -> bool:
        """Whether the original edge ``u -> v`` belongs to the shrunk graph."""
        pu = self._assign[u]
        return pu != self._assign[v] or self._terminal[pu]

    def original_edge_mask(self) -> np.ndarray:
        a = self.index.layout.assignment
        su, sv = a[self.g.src], a[self.g.dst]
        return (su != sv) | self.terminal[su]

    def _pair_arrays(self):
        sk = self.index.skyline
        counts = np.diff(sk.pair_start)
        entry_of_pair = np.repeat(sk.entries, np.diff(sk.entry_pair_start))
        subset = self.index.layout.assignment[entry_of_pair] if len(entry_of_pair) else np.zeros(0, np.int64)
        live = ~self.terminal[subset] if len(subset) else np.zeros(0, bool)
        return entry_of_pair, sk.pair_exit, counts, live

    def edge_count(self, survivors: np.ndarray | None = None) -> int:
        """|E| of the shrunk graph, or of its restriction to ``survivors``."""
        keep = self.original_edge_mask()
        entry, exit, counts, live = self._pair_arrays()
        if survivors is not None:
            keep &= survivors[self.g.src] & survivors[self.g.dst]
            live = live & survivors[entry] & survivors[exit]
        return int(keep.sum() + counts[live].sum())

    def skyline_edges_from(self, v: int) -> list:
        """``index.expansion(v)`` when ``v`` is an entry of a non-terminal
        subset, else nothing."""
        if self._terminal[self._assign[v]]:
            return []
        return self.index.expansion(v)

    def skyline_groups_from(self, v: int):
        """``index.expansion_groups(v)`` for entries of non-terminal subsets."""
        if self._terminal[self._assign[v]]:
            return None
        return self.index.expansion_groups(v)

    def materialize(self) -> list[ShrunkEdge]:
        """Every edge explicitly; meant for small graphs and tests."""
        out = []
        sk = self.index.skyline
        for u in self.vertices.tolist():
            for v, c in self.g.out_adj[u]:
                if self.keeps_edge(u, v):
                    out.append(ShrunkEdge(u, v, c))
            p = self._assign[u]
            if self._terminal[p] or u not in sk.entry_pos:
                continue
            pos = sk.entry_pos[u]
            for q in range(int(sk.entry_pair_start[pos]), int(sk.entry_pair_start[pos + 1])):
                exit = int(sk.pair_exit[q])
                for t, path in enumerate(self.index.skyline_set(u, exit).paths):
                    out.append(ShrunkEdge(u, exit, path.cost, (p, u, exit, t)))
        return out


def build_shrunk_graph(index: PartitionIndex, g: MultiCostGraph, s: int, e: int) -> ShrunkGraph:
    if not (0 <= s < g.n and 0 <= e < g.n):
        raise ValueError("query vertex outside the graph")
    return ShrunkGraph(index, g, s, e)


# --- vertex filtering ---------------------------------------------------------


@dataclass
class FilterResult:
    survivors: np.ndarray | None
    tau: float
    seed_path: Path | None
    phi_from: np.ndarray | None = None
    phi_to: np.ndarray | None = None

    @property
    def surviving_set(self) -> set[int]:
        return set(np.flatnonzero(self.survivors).tolist()) if self.survivors is not None else set()


def vertex_filter(
    shrunk: ShrunkGraph, index: PartitionIndex, s: int, e: int, f: ScoreFunction, *, apply: bool = True
) -> FilterResult:
    """Witness-based upper bound and the vertices it rules out.

    ``tau`` is the best score among the per-dimension shortest ``s -> e``
    paths; a shrunk-graph vertex ``v`` is removed when even its LBOP detour
    ``f(phi(s,v) + phi(v,e))`` exceeds ``tau``. With no witness there is no
    route at all and ``survivors`` is None. ``apply=False`` keeps every
    shrunk-graph vertex but still returns the bound tables, which hold
    values for the shrunk-graph vertices (``inf`` elsewhere).
    """
    eng = index.engine(shrunk.g)
    phi_to = eng.bounds_to(e)
    if shrunk.ps != shrunk.pe:
        eng.extend_to(phi_to, shrunk.ps)
    witnesses = eng.witnesses(s, e, phi_to)
    if not witnesses:
        return FilterResult(None, INF, None)
    seed = min(witnesses, key=lambda p: (f(p.cost), len(p.vertices), p.vertices))
    tau = f(seed.cost)
    phi_from = eng.bounds_from(s)
    if shrunk.ps != shrunk.pe:
        eng.extend_from(phi_from, shrunk.pe)
    survivors = shrunk.mask.copy()
    if apply:
        verts = np.flatnonzero(survivors)
        with np.errstate(invalid="ignore"):
            detour = f.evaluate_many(phi_from[:, verts] + phi_to[:, verts])
        drop = ~(detour <= tau * (1 + FILTER_SLACK) + FILTER_SLACK)
        survivors[verts[drop]] = False
        survivors[[s, e]] = True
    return FilterResult(survivors, tau, seed, phi_from, phi_to)


# --- branch and bound ---------------------------------------------------------


class _Labels:
    """Pareto label sets per vertex; a new cost is rejected when some stored
    label is componentwise <= it."""

    __slots__ = ("sets",)

    def __init__(self):
        self.sets: dict[int, list] = {}

    def covered(self, v: int, c) -> bool:
        for p in self.sets.get(v, ()):
            for x, y in zip(p, c):
                if x > y:
                    break
            else:
                return True
        return False

    def add(self, v: int, c) -> None:
        cur = self.sets.get(v)
        if cur is None:
            self.sets[v] = [c]
            return
        cur[:] = [p for p in cur if not all(x <= y for x, y in zip(c, p))]
        cur.append(c)


class _Labels2:
    """``_Labels`` for two dimensions: each vertex's labels sorted by the
    first component, so the second is strictly decreasing and both the
    cover test and insertion are a binary search."""

    __slots__ = ("xs", "ys")

    def __init__(self):
        self.xs: dict[int, list] = {}
        self.ys: dict[int, list] = {}

    def covered(self, v: int, c) -> bool:
        xs = self.xs.get(v)
        if not xs:
            return False
        i = bisect_right(xs, c[0]) - 1
        return i >= 0 and self.ys[v][i] <= c[1]

    def add(self, v: int, c) -> None:
        """Insert ``c``, which must not be covered, dropping labels it covers."""
        xs = self.xs.get(v)
        if xs is None:
            self.xs[v] = [c[0]]
            self.ys[v] = [c[1]]
            return
        ys = self.ys[v]
        i = bisect_left(xs, c[0])
        j = i
        while j < len(xs) and ys[j] >= c[1]:
            j += 1
        xs[i:j] = [c[0]]
        ys[i:j] = [c[1]]


def _slack(best: float) -> float:
    """``best`` widened so that float-evaluated bounds never cut a tie."""
    return best * (1 + FILTER_SLACK) + FILTER_SLACK if best != INF else INF


def branch_and_bound(*args, **kwargs) -> tuple[tuple, CostVector] | None:
    """Best-first search ordered by ``f(acc + phi(v, e))``; see
    ``_branch_and_bound`` for the arguments."""
    # bounds at unreachable vertices are inf; inf arithmetic is expected
    with np.errstate(invalid="ignore", over="ignore"):
        return _branch_and_bound(*args, **kwargs)


def _branch_and_bound(
    g: MultiCostGraph,
    s: int,
    e: int,
    f: ScoreFunction,
    phi_to: np.ndarray,
    *,
    allowed: np.ndarray,
    keep_edge=None,
    skyline_groups=None,
    skyline_path=None,
    tau: float = INF,
    seed_path: Path | None = None,
    use_tau: bool = True,
    use_dominance: bool = True,
    use_contour: bool = True,
    stats: QueryStats,
) -> tuple[tuple, CostVector] | None:
    """``phi_to`` is a ``(d, n)`` table of LBOPs to ``e``, read only at
    allowed vertices. ``allowed`` masks the searchable vertices;
    ``keep_edge(u, v)`` filters original edges; ``skyline_groups(v)``
    returns the index's contour groups out of ``v`` (or None) and
    ``skyline_path(entry, label)`` their vertices. Returns ``(walk, cost)``
    of the best path found, walk as original ids.
    """
    integral = g.integral
    zero = zero_vector(g.d) if integral else tuple(0.0 for _ in range(g.d))
    best = tau if use_tau else INF
    cut = _slack(best)
    best_node = None
    if use_tau and seed_path is not None:
        best_node = ("seed", seed_path)
    labels = _Labels2() if g.d == 2 else _Labels()
    heap: list = []
    tick = count()
    out_adj = g.out_adj
    evaluate, evaluate_many = f.evaluate, f.evaluate_many
    allow = allowed.tolist()
    rows = [phi_to[x] for x in range(g.d)]
    lbound: dict[int, tuple | None] = {}
    add = operator.add

    def bound_of(w: int):
        lb = lbound.get(w, False)
        if lb is False:
            vals = [float(r[w]) for r in rows]
            if not all(map(math.isfinite, vals)):
                lb = None
            else:
                lb = tuple(int(x) for x in vals) if integral else tuple(vals)
            lbound[w] = lb
        return lb

    def on_path(node, w) -> bool:
        while node is not None:
            if node[0] == w:
                return True
            node = node[2]
        return False

    def offer(parent, w, acc, via, bound=None):
        """Generate one child; updates best or the heap."""
        nonlocal best, best_node, cut
        stats.generated += 1
        if not use_dominance and on_path(parent, w):
            stats.pruned_revisit += 1
            return
        if w == e:
            score = evaluate(acc)
            if score < best:
                best = score
                cut = _slack(best)
                best_node = (w, acc, parent, via, parent[4] + 1)
            else:
                stats.pruned_tau += 1
            return
        if bound is None:
            lb = bound_of(w)
            if lb is None:
                stats.pruned_tau += 1
                return
            bound = evaluate(tuple(map(add, acc, lb)))
        if use_tau and bound >= best:
            stats.pruned_tau += 1
            return
        if use_dominance and labels.covered(w, acc):
            stats.pruned_dominance += 1
            return
        nv = parent[4] + 1
        heapq.heappush(heap, (bound, nv, w, next(tick), (w, acc, parent, via, nv), None))

    root = (s, zero, None, None, 1)
    lb0 = bound_of(s)
    if lb0 is not None:
        heapq.heappush(heap, (evaluate(lb0), 1, s, next(tick), root, None))

    # real nodes carry exact bounds; virtual children carry float bounds and
    # are compared against the widened cut instead
    while heap and not heap[0][0] > cut:
        bound, _, _, _, node, group = heapq.heappop(heap)
        if group is None and bound >= best:
            continue
        if group is not None:
            # cursor over one expansion's contour groups, in bound order
            parent = node
            order, keys, grp, pos = group
            t = order[pos]
            if pos + 1 < len(order):
                nxt = order[pos + 1]
                heapq.heappush(heap, (
                    keys[nxt], parent[4] + 1, int(grp.exit[nxt]), next(tick), parent, (order, keys, grp, pos + 1),
                ))
            exit = int(grp.exit[t])
            items = grp.items[t]
            acc0 = parent[1]
            entry = parent[0]
            # every member costs at least the contour point, so a label
            # covering acc + cp covers the whole group
            if use_dominance and labels.covered(exit, tuple(map(add, acc0, grp.cp_list[t]))):
                stats.generated += len(items)
                stats.pruned_dominance += len(items)
                continue
            if exit == e:
                for c, lab in items:
                    offer(parent, exit, tuple(map(add, acc0, c)), (entry, lab))
                continue
            lb = bound_of(exit)
            for c, lab in items:
                acc = tuple(map(add, acc0, c))
                offer(parent, exit, acc, (entry, lab), evaluate(tuple(map(add, acc, lb))))
            continue
        v, acc = node[0], node[1]
        if use_dominance:
            if labels.covered(v, acc):
                stats.pruned_dominance += 1
                continue
            labels.add(v, acc)
        stats.expanded += 1
        for w, c in out_adj[v]:
            if not allow[w] or (keep_edge is not None and not keep_edge(v, w)):
                continue
            offer(node, w, tuple(map(add, acc, c)), None)
        if skyline_groups is None:
            continue
        grp = skyline_groups(v)
        if grp is None:
            continue
        ok = allowed[grp.exit]
        if not ok.any():
            continue
        nv = node[4] + 1
        if use_contour:
            acc_arr = np.asarray(acc, dtype=np.float64)[:, None]
            virt = evaluate_many(acc_arr + grp.cp + phi_to[:, grp.exit])
            stats.virtual_children += int(ok.sum())
            live = ok & (virt <= cut) if use_tau else ok & ~np.isnan(virt) & (virt < INF)
            stats.pruned_contour += int(grp.size[ok & ~live].sum())
            order = np.flatnonzero(live)
            if len(order):
                order = order[np.argsort(virt[order], kind="stable")].tolist()
                keys = virt.tolist()
                first = order[0]
                heapq.heappush(heap, (keys[first], nv, int(grp.exit[first]), next(tick), node, (order, keys, grp, 0)))
        else:
            for t in np.flatnonzero(ok).tolist():
                exit = int(grp.exit[t])
                for c, lab in grp.items[t]:
                    offer(node, exit, tuple(map(add, acc, c)), (v, lab))

    if best_node is None:
        return None
    if best_node[0] == "seed":
        return best_node[1].vertices, best_node[1].cost
    walk: list[int] = []
    node = best_node
    while node is not None:
        via = node[3]
        if via is None:
            walk.append(node[0])
        else:
            walk.extend(reversed(skyline_path(via[0], via[1])[1:]))
        node = node[2]
    walk.reverse()
    return tuple(walk), best_node[1]


# --- linear fast path ---------------------------------------------------------


_SCALAR_CACHE: dict = {}


def _scalarized(g: MultiCostGraph, f: ScoreFunction) -> csr_matrix:
    key = (id(g), f.name, f.weights)
    hit = _SCALAR_CACHE.get(key)
    if hit is None or hit[0] is not g:
        if f.weights is not None:
            w = g.costs.astype(np.float64) @ np.asarray(f.weights, dtype=np.float64)
        else:
            w = np.asarray([f.evaluate(tuple(c)) for c in g.costs.tolist()], dtype=np.float64)
        mat = csr_matrix((w, (g.src, g.dst)), shape=(g.n, g.n))
        hit = (g, mat)
        _SCALAR_CACHE.clear()
        _SCALAR_CACHE[key] = hit
    return hit[1]


def scalarized_search(g: MultiCostGraph, s: int, e: int, f: ScoreFunction) -> tuple[tuple, CostVector] | None:
    """Single-criterion Dijkstra with per-edge weight ``f(w(edge))``; exact
    for additive ``f``."""
    _, pred = dijkstra(_scalarized(g, f), directed=True, indices=s, return_predecessors=True)
    if s != e and pred[e] < 0:
        return None
    seq = [e]
    while seq[-1] != s:
        seq.append(int(pred[seq[-1]]))
    seq.reverse()
    return tuple(seq), path_cost(g, seq)


# --- entry point --------------------------------------------------------------


def query_optimal(
    index: PartitionIndex,
    g: MultiCostGraph,
    s: int,
    e: int,
    f: ScoreFunction,
    *,
    tau: bool = True,
    dominance: bool = True,
    contour: bool = True,
    filtering: bool = True,
    force_bnb: bool = False,
) -> QueryResult:
    """Minimum-score simple ``s -> e`` path.

    Linear score functions go through scalarized Dijkstra unless
    ``force_bnb``. The four flags switch individual pruning rules off; the
    returned score never depends on them.
    """
    t0 = time.perf_counter()
    if f.d != g.d:
        raise ValueError(f"score function arity {f.d} != graph dimension {g.d}")
    if index.graph_hash != g.content_hash():
        raise ValueError("index does not belong to this graph")
    if not (0 <= s < g.n and 0 <= e < g.n):
        raise ValueError("query vertex outside the graph")
    stats = QueryStats()
    if s == e:
        zero = zero_vector(g.d)
        stats.wall_time = time.perf_counter() - t0
        return QueryResult(Path((s,), zero), zero, f(zero), stats)
    if f.declared_linear and not force_bnb:
        stats.method = "scalarized"
        found = scalarized_search(g, s, e, f)
        stats.wall_time = time.perf_counter() - t0
        if found is None:
            return not_found(stats)
        walk, cost = found
        return QueryResult(Path(walk, cost), cost, f(cost), stats)
    shrunk = build_shrunk_graph(index, g, s, e)
    filt = vertex_filter(shrunk, index, s, e, f, apply=filtering)
    stats.shrunk_vertices = int(shrunk.mask.sum())
    if filt.survivors is None:
        stats.wall_time = time.perf_counter() - t0
        return not_found(stats)
    stats.surviving_vertices = int(filt.survivors.sum())
    stats.filtered_vertices = stats.shrunk_vertices - stats.surviving_vertices
    found = branch_and_bound(
        g, s, e, f, filt.phi_to,
        allowed=filt.survivors,
        keep_edge=shrunk.keeps_edge,
        skyline_groups=shrunk.skyline_groups_from,
        skyline_path=index.skyline.path_vertices,
        tau=filt.tau, seed_path=filt.seed_path,
        use_tau=tau, use_dominance=dominance, use_contour=contour,
        stats=stats,
    )
    stats.wall_time = time.perf_counter() - t0
    if found is None:
        return not_found(stats)
    walk, _ = found
    simple = erase_loops(walk)
    cost = path_cost(g, simple)
    return QueryResult(Path(simple, cost), cost, f(cost), stats)


def shrunk_graph_stats(shrunk: ShrunkGraph, filt: FilterResult) -> dict:
    """|V|, |E| of the shrunk graph before and after filtering."""
    out = {"V": int(shrunk.mask.sum()), "E": shrunk.edge_count()}
    if filt.survivors is not None:
        out["V_f"] = int(filt.survivors.sum())
        out["E_f"] = shrunk.edge_count(filt.survivors)
    return out
