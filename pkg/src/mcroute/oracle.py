"""Brute-force reference solvers and the no-index search baseline.

The oracles enumerate simple paths depth-first in lexicographic vertex
order. They prune only with facts that follow from non-negative costs and
a monotone score, never with anything the index computes, so they stay an
independent check on the query engine.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from operator import add
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .graph import INF, CostVector, MultiCostGraph, Path, path_cost, weakly_dominates, zero_vector
from .query import QueryResult, QueryStats, ShrunkGraph, branch_and_bound, not_found
from .scoring import ScoreFunction
from .skyline import SkylinePathSet, pareto_filter

ORACLE_MAX_VERTICES = 25


class OracleTooLarge(ValueError):
    pass


def _guard(n: int, limit: int) -> None:
    if n > limit:
        raise OracleTooLarge(f"graph has {n} vertices; oracle limit is {limit}")


def _distances_to(adj, e: int, d: int) -> tuple[dict[int, CostVector], list[dict[int, int]]]:
    """Per-dimension shortest distance from every vertex of ``adj`` to ``e``
    (plain Dijkstra over the reversed lists; ``inf`` when unreachable), plus
    the next hop towards ``e`` per dimension."""
    items = adj.items() if isinstance(adj, dict) else enumerate(adj)
    back: dict[int, list] = {}
    nodes = set()
    for u, out in items:
        nodes.add(u)
        for v, c, _ in out:
            back.setdefault(v, []).append((u, c))
    cols, hops = [], []
    for x in range(d):
        dist = dict.fromkeys(nodes, INF)
        dist[e] = 0
        nxt: dict[int, int] = {}
        heap = [(0, e)]
        while heap:
            du, u = heapq.heappop(heap)
            if du > dist[u]:
                continue
            for w, c in back.get(u, ()):
                nd = du + c[x]
                if nd < dist[w]:
                    dist[w] = nd
                    nxt[w] = u
                    heapq.heappush(heap, (nd, w))
        cols.append(dist)
        hops.append(nxt)
    return {u: tuple(col[u] for col in cols) for u in nodes}, hops


def _upper_bound(adj, s: int, e: int, f: ScoreFunction, zero: CostVector, hops) -> float:
    """Best score among the per-dimension shortest ``s -> e`` paths (each
    edge taken at its cheapest parallel copy in that dimension)."""
    best = INF
    for x, nxt in enumerate(hops):
        if s not in nxt:
            continue
        acc, u = zero, s
        while u != e:
            v = nxt[u]
            c = min((c for w, c, _ in adj[u] if w == v), key=lambda c: c[x])
            acc = tuple(map(add, acc, c))
            u = v
        best = min(best, f.evaluate(acc))
    return best


def _dfs_optimal(adj, s: int, e: int, f: ScoreFunction, zero: CostVector):
    """Minimum-score simple path over ``adj[u] = [(v, cost, tag), ...]``.

    Returns ``(score, vertices, cost, tags)`` or None. A partial path ending
    at ``v`` is cut once ``f(cost + h(v))`` reaches the best complete score,
    where ``h(v)`` holds the per-dimension shortest distances from ``v`` to
    ``e``: every completion costs at least that much, and ``f`` is
    monotone. Before that, prefixes whose bound exceeds the score of some
    per-dimension shortest path are cut. The first optimum in sorted
    depth-first order always survives: its prefixes score at most the
    optimum, which is below any earlier (non-optimal) incumbent.
    """
    best = [INF, None, None, None]
    on_path = {s}
    seq = [s]
    tags: list = []
    evaluate = f.evaluate
    h, hops = _distances_to(adj, e, len(zero))
    cap = _upper_bound(adj, s, e, f, zero, hops) if s != e else INF

    def visit(u: int, acc: CostVector) -> None:
        for v, c, tag in adj[u]:
            if v in on_path:
                continue
            nacc = tuple(map(add, acc, c))
            if v == e:
                score = evaluate(nacc)
                if score < best[0]:
                    best[:] = [score, tuple(seq) + (v,), nacc, tuple(tags) + (tag,)]
                continue
            bound = evaluate(tuple(map(add, nacc, h[v])))
            if bound >= best[0] or bound > cap:
                continue
            on_path.add(v)
            seq.append(v)
            tags.append(tag)
            visit(v, nacc)
            tags.pop()
            seq.pop()
            on_path.discard(v)

    if s == e:
        return f(zero), (s,), zero, ()
    visit(s, zero)
    return None if best[1] is None else tuple(best)


def _graph_adj(g: MultiCostGraph):
    return [sorted((v, c, None) for v, c in g.out_adj[u]) for u in range(g.n)]


def oracle_optimal_path(
    g: MultiCostGraph, s: int, e: int, f: ScoreFunction, *, max_vertices: int = ORACLE_MAX_VERTICES
) -> QueryResult:
    """Exhaustive optimum; ties go to the lexicographically smallest vertex
    sequence (the first one met in sorted depth-first order)."""
    _guard(g.n, max_vertices)
    t0 = time.perf_counter()
    stats = QueryStats(method="oracle")
    found = _dfs_optimal(_graph_adj(g), s, e, f, zero_vector(g.d))
    stats.wall_time = time.perf_counter() - t0
    if found is None:
        return not_found(stats)
    score, verts, cost, _ = found
    return QueryResult(Path(verts, cost), cost, score, stats)


def oracle_optimal_on_shrunk(shrunk: ShrunkGraph, f: ScoreFunction, *, max_vertices: int = ORACLE_MAX_VERTICES):
    """Exhaustive optimum over the materialised shrunk multigraph.

    Returns ``(score, vertices, cost, tags)`` with ``tags`` naming the
    multi-edge used at each step, or None when ``e`` is unreachable.
    """
    _guard(shrunk.g.n, max_vertices)
    adj: dict[int, list] = {int(v): [] for v in shrunk.vertices}
    for edge in shrunk.materialize():
        adj[edge.source].append((edge.target, edge.cost, edge.tag))
    for u in adj:
        adj[u].sort(key=lambda t: (t[0], t[1], t[2] or ()))
    return _dfs_optimal(adj, shrunk.s, shrunk.e, f, zero_vector(shrunk.g.d))


def oracle_skyline_set(
    g: MultiCostGraph, s: int, e: int, *, max_vertices: int = ORACLE_MAX_VERTICES
) -> SkylinePathSet:
    """All non-dominated simple ``s -> e`` paths by enumeration, one per
    distinct cost vector (the lexicographically smallest sequence)."""
    _guard(g.n, max_vertices)
    zero = zero_vector(g.d)
    if s == e:
        return SkylinePathSet((s, e), (Path((s,), zero),))
    adj = _graph_adj(g)
    found: list[tuple[tuple, CostVector]] = []
    on_path = {s}
    seq = [s]

    def visit(u: int, acc: CostVector) -> None:
        for v, c, _ in adj[u]:
            if v in on_path:
                continue
            nacc = tuple(map(add, acc, c))
            # a complete path already at or below this prefix covers every extension
            if any(weakly_dominates(fc, nacc) for _, fc in found):
                continue
            if v == e:
                found.append((tuple(seq) + (v,), nacc))
                continue
            on_path.add(v)
            seq.append(v)
            visit(v, nacc)
            seq.pop()
            on_path.discard(v)

    visit(s, zero)
    keep = pareto_filter([c for _, c in found])
    paths = tuple(Path(found[i][0], found[i][1]) for i in keep)
    return SkylinePathSet((s, e), tuple(sorted(paths, key=lambda p: (p.cost, p.vertices))))


def enumerate_simple_paths(g: MultiCostGraph, s: int, e: int, limit: int | None = None):
    """Yield simple ``s -> e`` vertex sequences in lexicographic order."""
    adj = [sorted(v for v, _ in g.out_adj[u]) for u in range(g.n)]
    if s == e:
        yield (s,)
        return
    emitted = 0
    stack = [(s, iter(adj[s]))]
    seq = [s]
    on_path = {s}
    while stack:
        u, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            on_path.discard(seq.pop())
            continue
        if nxt in on_path:
            continue
        if nxt == e:
            yield tuple(seq) + (e,)
            emitted += 1
            if limit is not None and emitted >= limit:
                return
            continue
        seq.append(nxt)
        on_path.add(nxt)
        stack.append((nxt, iter(adj[nxt])))


def random_simple_path(g: MultiCostGraph, s: int, rng: np.random.Generator, max_len: int | None = None) -> Path:
    """Random walk from ``s`` that never revisits a vertex."""
    seq = [s]
    seen = {s}
    while max_len is None or len(seq) < max_len:
        nbrs = [v for v, _ in g.out_adj[seq[-1]] if v not in seen]
        if not nbrs or (len(seq) > 1 and rng.random() < 0.15):
            break
        v = nbrs[int(rng.integers(len(nbrs)))]
        seq.append(v)
        seen.add(v)
    return Path(tuple(seq), path_cost(g, seq))


# --- no-index baseline ----------------------------------------------------------


def bf_search_baseline(
    g: MultiCostGraph,
    s: int,
    e: int,
    f: ScoreFunction,
    *,
    tau: bool = True,
    dominance: bool = True,
) -> QueryResult:
    """Best-first branch and bound directly on ``g``.

    Bounds come from ``d`` backward single-criterion searches from ``e``
    run at query time; the per-dimension shortest paths seed the incumbent.
    """
    t0 = time.perf_counter()
    stats = QueryStats(method="bf-search")
    if s == e:
        zero = zero_vector(g.d)
        return QueryResult(Path((s,), zero), zero, f(zero), stats)
    phi_to = np.stack(
        [dijkstra(g.csr(x, True), directed=True, indices=e) for x in range(g.d)]
    )
    if not np.isfinite(phi_to[0, s]):
        stats.wall_time = time.perf_counter() - t0
        return not_found(stats)
    witnesses = []
    for x in range(g.d):
        _, pred = dijkstra(g.csr(x), directed=True, indices=s, return_predecessors=True)
        seq = [e]
        while seq[-1] != s:
            seq.append(int(pred[seq[-1]]))
        seq.reverse()
        witnesses.append(Path(tuple(seq), path_cost(g, seq)))
    seed = min(witnesses, key=lambda p: (f(p.cost), len(p.vertices), p.vertices))
    allowed = np.ones(g.n, dtype=bool)
    found = branch_and_bound(
        g, s, e, f, phi_to, allowed=allowed, tau=f(seed.cost), seed_path=seed,
        use_tau=tau, use_dominance=dominance, use_contour=False, stats=stats,
    )
    stats.wall_time = time.perf_counter() - t0
    walk, cost = found
    return QueryResult(Path(walk, cost), cost, f(cost), stats)


# --- clustering oracles ------------------------------------------------------------


def _dist(points: Sequence[CostVector]) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    diff = arr[:, None, :] - arr[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def contiguous_split_optimum(points: Sequence[CostVector], r: int) -> float:
    """Minimum partition diameter over all splits of the x-sorted points
    into at most ``r`` contiguous runs, by enumerating cut positions."""
    order = sorted(range(len(points)), key=lambda i: tuple(points[i]))
    dist = _dist([points[i] for i in order])
    m = len(order)
    best = math.inf
    for groups in range(1, min(r, m) + 1):
        for cuts in itertools.combinations(range(1, m), groups - 1):
            bounds = (0,) + cuts + (m,)
            diam = max(dist[a:b, a:b].max() for a, b in zip(bounds, bounds[1:]))
            best = min(best, float(diam))
    return best


def optimal_partition_diameter(points: Sequence[CostVector], r: int) -> float:
    """Exact minimum over all set partitions into at most ``r`` groups.

    For a candidate diameter D, points farther apart than D must be in
    different groups; D is feasible iff that conflict graph is
    r-colourable. The smallest feasible pairwise distance is the optimum.
    """
    m = len(points)
    if m == 0:
        raise ValueError("no points")
    dist = _dist(points)
    candidates = sorted({0.0} | {float(x) for x in dist[np.triu_indices(m, 1)]})

    def colourable(limit: float) -> bool:
        conflict = [[j for j in range(m) if dist[i, j] > limit] for i in range(m)]
        order = sorted(range(m), key=lambda i: -len(conflict[i]))
        colour = [-1] * m

        def place(t: int, used: int) -> bool:
            if t == m:
                return True
            i = order[t]
            taken = {colour[j] for j in conflict[i]}
            # a fresh colour is interchangeable with any other unused one
            for c in range(min(used + 1, r)):
                if c not in taken:
                    colour[i] = c
                    if place(t + 1, max(used, c + 1)):
                        return True
                    colour[i] = -1
            return False

        return place(0, 0)

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if colourable(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return candidates[lo]
