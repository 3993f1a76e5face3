"""k-way vertex partitioning and entry/exit border derivation.

The built-in partitioner is a small multilevel scheme in the spirit of
METIS: heavy-edge matching coarsens the (symmetrised, unit-weight) graph,
the coarsest graph is split by greedy region growing, and each uncoarsening
step runs boundary refinement under a soft balance window.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, field
from typing import IO, Mapping, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .graph import MultiCostGraph

BALANCE_SLACK = 0.25


class PartitionError(ValueError):
    pass


@dataclass
class PartitionLayout:
    """A k-partition of the vertex set plus its border vertices.

    ``entries[p]`` holds the members of subset ``p`` with an in-neighbour
    outside ``p``; ``exits[p]`` those with an out-neighbour outside ``p``.
    """

    k: int
    assignment: np.ndarray
    members: list[np.ndarray]
    entries: list[tuple[int, ...]]
    exits: list[tuple[int, ...]]
    cut_edges: int
    stats: dict = field(default_factory=dict)

    def subset_of(self, v: int) -> int:
        return int(self.assignment[v])

    @property
    def all_entries(self) -> tuple[int, ...]:
        return tuple(sorted(v for es in self.entries for v in es))

    @property
    def all_exits(self) -> tuple[int, ...]:
        return tuple(sorted(v for xs in self.exits for v in xs))

    @property
    def borders(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.all_entries) | set(self.all_exits)))

    def is_border(self, v: int) -> bool:
        return v in self._border_set

    @property
    def _border_set(self) -> frozenset:
        cached = self.stats.get("_borders")
        if cached is None:
            cached = self.stats["_borders"] = frozenset(self.borders)
        return cached

    def sizes(self) -> list[int]:
        return [len(m) for m in self.members]


def compute_borders(
    g: MultiCostGraph, assignment: Union[Sequence[int], Mapping[int, int], np.ndarray]
) -> PartitionLayout:
    """Derive entries, exits and the cut from a total vertex assignment."""
    if isinstance(assignment, Mapping):
        missing = [v for v in range(g.n) if v not in assignment]
        if missing:
            raise PartitionError(f"assignment misses {len(missing)} vertices, e.g. {missing[0]}")
        assignment = [assignment[v] for v in range(g.n)]
    a = np.asarray(assignment, dtype=np.int64)
    if a.shape != (g.n,):
        raise PartitionError(f"assignment covers {a.size} of {g.n} vertices")
    if g.n and a.min() < 0:
        raise PartitionError("negative subset id")
    k = int(a.max()) + 1 if g.n else 0
    members = [np.flatnonzero(a == p) for p in range(k)]
    cross = a[g.src] != a[g.dst]
    entries: list[set] = [set() for _ in range(k)]
    exits: list[set] = [set() for _ in range(k)]
    for u, v in zip(g.src[cross].tolist(), g.dst[cross].tolist()):
        entries[a[v]].add(v)
        exits[a[u]].add(u)
    return PartitionLayout(
        k=k,
        assignment=a,
        members=members,
        entries=[tuple(sorted(s)) for s in entries],
        exits=[tuple(sorted(s)) for s in exits],
        cut_edges=int(cross.sum()),
    )


def load_partition(
    source: Union[str, os.PathLike, IO[str]], g: MultiCostGraph, k: int | None = None
) -> PartitionLayout:
    """Read one subset id per line (line ``i`` is vertex ``i``).

    Border sets are always recomputed from the graph.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) != g.n:
        raise PartitionError(f"expected {g.n} lines, found {len(lines)}")
    try:
        ids = [int(ln) for ln in lines]
    except ValueError as exc:
        raise PartitionError(f"bad subset id: {exc}") from None
    limit = k if k is not None else max(ids, default=-1) + 1
    for i, p in enumerate(ids):
        if not 0 <= p < limit:
            raise PartitionError(f"vertex {i}: subset id {p} out of range [0,{limit})")
    layout = compute_borders(g, ids)
    if k is not None and layout.k < k or any(len(m) == 0 for m in layout.members):
        raise PartitionError("partition file leaves a subset empty")
    return layout


def save_partition(layout: PartitionLayout, sink: Union[str, os.PathLike, IO[str]]) -> None:
    text = "".join(f"{int(p)}\n" for p in layout.assignment)
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sink.write(text)


# --- multilevel partitioner -------------------------------------------------


def _undirected(g: MultiCostGraph) -> sp.csr_matrix:
    a = sp.csr_matrix(
        (np.ones(g.m), (g.src, g.dst)), shape=(g.n, g.n), dtype=np.float64
    )
    a = (a + a.T).tocsr()
    a.sum_duplicates()
    a.sort_indices()
    return a


def _heavy_edge_matching(adj: sp.csr_matrix, vw: np.ndarray, max_vw: float, rng) -> np.ndarray:
    n = adj.shape[0]
    indptr, indices, data = adj.indptr.tolist(), adj.indices.tolist(), adj.data.tolist()
    weights = vw.tolist()
    match = [-1] * n
    for u in rng.permutation(n).tolist():
        if match[u] >= 0:
            continue
        best, best_w = -1, 0.0
        for i in range(indptr[u], indptr[u + 1]):
            v = indices[i]
            if v == u or match[v] >= 0 or weights[u] + weights[v] > max_vw:
                continue
            w = data[i]
            if w > best_w or (w == best_w and v < best):
                best, best_w = v, w
        if best < 0:
            match[u] = u
        else:
            match[u], match[best] = best, u
    cmap = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for u in range(n):
        if cmap[u] < 0:
            cmap[u] = nxt
            cmap[match[u]] = nxt
            nxt += 1
    return cmap


def _contract(adj: sp.csr_matrix, vw: np.ndarray, cmap: np.ndarray):
    nc = int(cmap.max()) + 1
    proj = sp.csr_matrix(
        (np.ones(len(cmap)), (np.arange(len(cmap)), cmap)), shape=(len(cmap), nc)
    )
    coarse = (proj.T @ adj @ proj).tocsr()
    coarse.setdiag(0)
    coarse.eliminate_zeros()
    coarse.sort_indices()
    return coarse, np.bincount(cmap, weights=vw, minlength=nc)


def _grow_regions(adj: sp.csr_matrix, vw: np.ndarray, k: int, rng) -> np.ndarray:
    """Greedy graph growing from k well-spread seeds."""
    n = adj.shape[0]
    indptr, indices, data = adj.indptr, adj.indices, adj.data
    part = np.full(n, -1, dtype=np.int64)
    seeds = [int(rng.integers(n))]
    hop = np.full(n, np.inf)
    while len(seeds) < k:
        # farthest vertex (in hops) from the current seeds; unreachable counts as farthest
        hop = np.minimum(hop, _bfs_hops(indptr, indices, seeds[-1], n))
        hop[seeds] = -1
        far = np.flatnonzero(hop == hop.max())
        seeds.append(int(far[0]))
    weight = np.zeros(k)
    frontier: list[dict[int, float]] = [dict() for _ in range(k)]
    for p, s in enumerate(seeds):
        part[s] = p
        weight[p] += vw[s]
    for p, s in enumerate(seeds):
        for i in range(indptr[s], indptr[s + 1]):
            v = int(indices[i])
            if part[v] < 0:
                frontier[p][v] = frontier[p].get(v, 0.0) + data[i]
    heap = [(weight[p], p) for p in range(k)]
    heapq.heapify(heap)
    remaining = n - k
    while remaining and heap:
        w, p = heapq.heappop(heap)
        front = frontier[p]
        for v in [v for v in front if part[v] >= 0]:
            del front[v]
        if not front:
            continue
        v = max(front, key=lambda x: (front[x], -x))
        del front[v]
        part[v] = p
        weight[p] += vw[v]
        remaining -= 1
        for i in range(indptr[v], indptr[v + 1]):
            x = int(indices[i])
            if part[x] < 0:
                front[x] = front.get(x, 0.0) + data[i]
        heapq.heappush(heap, (weight[p], p))
    for v in np.flatnonzero(part < 0):
        # vertices no region reached: join the lightest subset
        p = int(np.argmin(weight))
        part[v] = p
        weight[p] += vw[v]
    return part


def _bfs_hops(indptr, indices, source: int, n: int) -> np.ndarray:
    from scipy.sparse.csgraph import breadth_first_order

    adj = sp.csr_matrix((np.ones(len(indices)), indices, indptr), shape=(n, n))
    order, pred = breadth_first_order(adj, source, directed=False, return_predecessors=True)
    hops = np.full(n, np.inf)
    hops[source] = 0
    for v in order[1:]:
        hops[v] = hops[pred[v]] + 1
    return hops


def _refine(adj: sp.csr_matrix, vw: np.ndarray, part: np.ndarray, k: int, rng, passes: int = 8):
    """Greedy boundary refinement: move vertices to the neighbouring subset
    with the largest positive cut gain while staying inside the balance window."""
    n = adj.shape[0]
    indptr, indices, data = adj.indptr.tolist(), adj.indices.tolist(), adj.data.tolist()
    weights = vw.tolist()
    p_of = part.tolist()
    load = np.bincount(part, weights=vw, minlength=k).tolist()
    count = np.bincount(part, minlength=k).tolist()
    target = sum(weights) / k
    hi = target * (1 + BALANCE_SLACK)
    lo = target * (1 - BALANCE_SLACK)
    for _ in range(passes):
        moved = 0
        for u in rng.permutation(n).tolist():
            pu = p_of[u]
            conn: dict[int, float] = {}
            for i in range(indptr[u], indptr[u + 1]):
                q = p_of[indices[i]]
                conn[q] = conn.get(q, 0.0) + data[i]
            if len(conn) <= 1 and pu in conn:
                continue
            internal = conn.get(pu, 0.0)
            best, best_gain = pu, 0.0
            for q in sorted(conn):
                if q == pu:
                    continue
                gain = conn[q] - internal
                if load[q] + weights[u] > hi and load[q] + weights[u] > load[pu]:
                    continue
                if gain > best_gain or (
                    gain == best_gain and best != pu and load[q] < load[best]
                ):
                    best, best_gain = q, gain
            over = load[pu] > hi
            if best == pu and over:
                # overweight subset: shed boundary vertices even at zero or small loss
                cands = [q for q in conn if q != pu and load[q] + weights[u] <= hi]
                if cands:
                    best = max(cands, key=lambda q: (conn[q], -load[q], -q))
            if best == pu or count[pu] == 1:
                continue
            if load[pu] - weights[u] < lo and not over and best_gain <= 0:
                continue
            p_of[u] = best
            load[pu] -= weights[u]
            load[best] += weights[u]
            count[pu] -= 1
            count[best] += 1
            moved += 1
        if not moved:
            break
    return np.asarray(p_of, dtype=np.int64)


def _repair_empty(g_adj: sp.csr_matrix, part: np.ndarray, k: int) -> np.ndarray:
    part = part.copy()
    degree = np.diff(g_adj.indptr)
    while True:
        sizes = np.bincount(part, minlength=k)
        empty = np.flatnonzero(sizes == 0)
        if not len(empty):
            return part
        big = int(np.argmax(sizes))
        cand = np.flatnonzero(part == big)
        boundary = [
            v for v in cand
            if np.any(part[g_adj.indices[g_adj.indptr[v]:g_adj.indptr[v + 1]]] != big)
        ]
        pool = boundary or list(cand)
        v = max(pool, key=lambda x: (degree[x], -x))
        part[v] = int(empty[0])


def partition_graph(g: MultiCostGraph, k: int = 50, seed: int = 0) -> PartitionLayout:
    """Multilevel k-way partition minimising the number of cut edges.

    Edge costs are ignored; only topology matters. Deterministic for a
    fixed seed. ``layout.stats`` records cut size and imbalance.
    """
    if k < 1:
        raise PartitionError("k must be >= 1")
    if k > g.n:
        raise PartitionError(f"k={k} exceeds the number of vertices ({g.n})")
    rng = np.random.default_rng(seed)
    adj = _undirected(g)
    if k == 1:
        part = np.zeros(g.n, dtype=np.int64)
    elif k == g.n:
        part = np.arange(g.n, dtype=np.int64)
    else:
        levels = []
        cur, vw = adj, np.ones(g.n)
        max_vw = max(1.0, 1.5 * g.n / k)
        coarse_target = max(20 * k, 64)
        while cur.shape[0] > coarse_target:
            cmap = _heavy_edge_matching(cur, vw, max_vw, rng)
            nc = int(cmap.max()) + 1
            if nc > 0.95 * cur.shape[0]:
                break
            levels.append((cur, vw, cmap))
            cur, vw = _contract(cur, vw, cmap)
        part = _grow_regions(cur, vw, k, rng)
        part = _refine(cur, vw, part, k, rng)
        for fine, fvw, cmap in reversed(levels):
            part = _refine(fine, fvw, part[cmap], k, rng)
        part = _repair_empty(adj, part, k)
    layout = compute_borders(g, part)
    sizes = layout.sizes()
    layout.stats.update(
        cut_edges=layout.cut_edges,
        max_size=max(sizes),
        min_size=min(sizes),
        imbalance=max(sizes) / (g.n / k),
        borders=len(layout.borders),
    )
    return layout
