"""Per-dimension lower bounds (LBOPs) and the inter/inner LBOP indexes.

The LBOP of a vertex pair is the vector of single-criterion shortest
distances, one per cost dimension, always measured on the full graph. It is
a componentwise lower bound on the cost of every path between the pair, and
no larger vector has that property.

Bulk index construction runs scipy's C Dijkstra over batches of sources;
``single_cost_distances`` is an independent pure-Python Dijkstra used for
on-demand searches and as a cross-check.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .graph import INF, CostVector, MultiCostGraph, Path, path_cost
from .partition import PartitionLayout

BATCH = 256


def single_cost_distances(
    g: MultiCostGraph, dimension: int, source: int, direction: str = "forward"
) -> tuple[list[float], list[int]]:
    """Dijkstra on one cost dimension.

    Returns ``(dist, parent)`` lists indexed by vertex; unreachable vertices
    have ``dist = inf`` and ``parent = -1``. With ``direction="backward"``
    distances are *to* ``source`` and ``parent`` is the next hop towards it.
    """
    if not 0 <= dimension < g.d:
        raise ValueError(f"dimension {dimension} outside [0,{g.d})")
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    adj = g.out_adj if direction == "forward" else g.in_adj
    dist = [INF] * g.n
    parent = [-1] * g.n
    dist[source] = 0
    heap = [(0, source)]
    done = [False] * g.n
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, cost in adj[u]:
            nd = du + cost[dimension]
            if nd < dist[v] or (nd == dist[v] and not done[v] and u < parent[v]):
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, parent


def combine_min(candidates: Sequence[tuple[CostVector, CostVector]], d: int) -> CostVector:
    """Componentwise ``min_r (a_r + b_r)`` over relay candidates ``(a_r, b_r)``.

    Each dimension may pick a different relay; no candidates gives all-inf.
    """
    out = [INF] * d
    for a, b in candidates:
        for x in range(d):
            s = a[x] + b[x]
            if s < out[x]:
                out[x] = s
    return tuple(out)


@dataclass
class Lbop:
    phi: CostVector
    witnesses: tuple[Path, ...] | None = None

    @property
    def reachable(self) -> bool:
        return any(x != INF for x in self.phi)


@dataclass
class InterIndex:
    """LBOPs from every border vertex (rows) to every entry (columns).

    ``phi[x, i, j]`` is the x-th component; cells whose endpoints share a
    subset are NaN (absent).
    """

    rows: np.ndarray
    cols: np.ndarray
    phi: np.ndarray
    row_pos: dict[int, int] = field(default_factory=dict)
    col_pos: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.row_pos = {int(v): i for i, v in enumerate(self.rows)}
        self.col_pos = {int(v): j for j, v in enumerate(self.cols)}

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def get(self, u: int, v: int) -> CostVector:
        cell = self.phi[:, self.row_pos[u], self.col_pos[v]]
        if np.isnan(cell[0]):
            raise KeyError(f"({u},{v}) share a subset; not stored in the inter-index")
        return tuple(_scalar(x) for x in cell)


@dataclass
class LbopInnerIndex:
    """Per subset: LBOPs from each entry to every member (``entry_rows``),
    from every member to each exit (``exit_cols``) and from each exit back
    to each entry of the same subset (``returns``).

    ``entry_rows[p]`` has shape ``(d, |entries_p|, |V_p|)``, ``exit_cols[p]``
    ``(d, |V_p|, |exits_p|)`` and ``returns[p]`` ``(d, |exits_p|, |entries_p|)``.
    Members are ordered as ``layout.members[p]``. All values are full-graph
    distances, so a path that leaves the subset and comes back is covered.
    """

    entry_rows: list[np.ndarray]
    exit_cols: list[np.ndarray]
    returns: list[np.ndarray]


def _scalar(x: float):
    return INF if x == math.inf else (int(x) if float(x).is_integer() else float(x))


def _batched(g: MultiCostGraph, sources: Sequence[int], reverse: bool):
    """Yield ``(chunk, dist)`` with ``dist`` shaped ``(d, len(chunk), n)``."""
    sources = list(sources)
    for start in range(0, len(sources), BATCH):
        chunk = sources[start:start + BATCH]
        dist = np.stack(
            [dijkstra(g.csr(x, reverse), directed=True, indices=chunk) for x in range(g.d)]
        ).reshape(g.d, len(chunk), g.n)
        yield chunk, dist


def build_inter_index(g: MultiCostGraph, layout: PartitionLayout) -> InterIndex:
    return build_lbop_indexes(g, layout)[0]


def build_lbop_inner_index(g: MultiCostGraph, layout: PartitionLayout) -> LbopInnerIndex:
    return build_lbop_indexes(g, layout)[1]


def _member_pos(layout: PartitionLayout, p: int) -> dict[int, int]:
    return {int(v): i for i, v in enumerate(layout.members[p])}


def build_lbop_indexes(g: MultiCostGraph, layout: PartitionLayout):
    """Build the inter-index and the LBOP inner index in one sweep."""
    d = g.d
    rows = np.asarray(layout.borders, dtype=np.int64)
    cols = np.asarray(layout.all_entries, dtype=np.int64)
    a = layout.assignment
    inter = np.full((d, len(rows), len(cols)), np.nan)
    entry_rows = [
        np.full((d, len(layout.entries[p]), len(layout.members[p])), np.inf)
        for p in range(layout.k)
    ]
    exit_cols = [
        np.full((d, len(layout.members[p]), len(layout.exits[p])), np.inf)
        for p in range(layout.k)
    ]
    returns = [
        np.full((d, len(layout.exits[p]), len(layout.entries[p])), np.inf)
        for p in range(layout.k)
    ]
    entry_slot = {v: (p, i) for p in range(layout.k) for i, v in enumerate(layout.entries[p])}
    exit_slot = {v: (p, i) for p in range(layout.k) for i, v in enumerate(layout.exits[p])}
    row_of = {int(v): i for i, v in enumerate(rows)}
    col_subset = a[cols] if len(cols) else np.zeros(0, dtype=np.int64)

    for chunk, dist in _batched(g, rows.tolist(), reverse=False):
        for b, u in enumerate(chunk):
            cross = col_subset != a[u]
            inter[:, row_of[u], cross] = dist[:, b, cols[cross]]
            if u in entry_slot:
                p, i = entry_slot[u]
                entry_rows[p][:, i, :] = dist[:, b, layout.members[p]]
            if u in exit_slot:
                p, j = exit_slot[u]
                returns[p][:, j, :] = dist[:, b, list(layout.entries[p])]
    for chunk, dist in _batched(g, list(layout.all_exits), reverse=True):
        for b, x in enumerate(chunk):
            p, j = exit_slot[x]
            exit_cols[p][:, :, j] = dist[:, b, layout.members[p]]
    for p in range(layout.k):
        # entry -> exit values exist in both tables; keep the forward-search
        # copy so the two agree bit for bit (serialization stores it once)
        at = _member_pos(layout, p)
        for i, v in enumerate(layout.entries[p]):
            exit_cols[p][:, at[v], :] = entry_rows[p][:, i, [at[x] for x in layout.exits[p]]]
    return InterIndex(rows, cols, inter), LbopInnerIndex(entry_rows, exit_cols, returns)


class LbopEngine:
    """LBOP lookups over a built index.

    Bound tables for a query pair are assembled from one search inside the
    terminal subset plus the stored matrices; a full-graph search is only a
    fallback. Tables are ``(d, n)`` arrays with ``inf`` where a value has not
    been filled in; ``extend_from``/``extend_to`` fill further subsets.
    """

    def __init__(self, g: MultiCostGraph, layout: PartitionLayout, inter: InterIndex, inner: LbopInnerIndex):
        self.g = g
        self.layout = layout
        self.inter = inter
        self.inner = inner
        n = g.n
        self.assign = layout.assignment
        self._assign_list = self.assign.tolist()
        self.local = np.full(n, -1, dtype=np.int64)
        for p in range(layout.k):
            self.local[layout.members[p]] = np.arange(len(layout.members[p]))
        self.entries = [np.asarray(es, dtype=np.int64) for es in layout.entries]
        self.exits = [np.asarray(xs, dtype=np.int64) for xs in layout.exits]
        self.loc_exits = [self.local[xs] for xs in self.exits]
        self.entry_idx = [{v: i for i, v in enumerate(es)} for es in layout.entries]
        self.exit_idx = [{v: i for i, v in enumerate(xs)} for xs in layout.exits]
        self.borders = inter.rows
        self.is_border = np.zeros(n, dtype=bool)
        self.is_border[self.borders] = True
        # inter-index columns grouped by subset
        col_subset = self.assign[inter.cols] if len(inter.cols) else np.zeros(0, dtype=np.int64)
        self.cols_of = [np.flatnonzero(col_subset == p) for p in range(layout.k)]
        self._cache: dict[tuple[int, bool], tuple[np.ndarray, np.ndarray]] = {}
        self._local_csr: dict[tuple[int, bool], list] = {}

    # -- searches -------------------------------------------------------------
    def search(self, v: int, reverse: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """Full-graph distances from (or to, if ``reverse``) ``v`` with
        predecessor arrays; shape ``(d, n)`` each. Cached."""
        key = (v, reverse)
        hit = self._cache.get(key)
        if hit is None:
            dist, pred = [], []
            for x in range(self.g.d):
                dx, px = dijkstra(
                    self.g.csr(x, reverse), directed=True, indices=v, return_predecessors=True
                )
                dist.append(dx)
                pred.append(px)
            hit = (np.asarray(dist), np.asarray(pred))
            if len(self._cache) > 64:
                self._cache.pop(next(iter(self._cache)))
            self._cache[key] = hit
        return hit

    def _subset_csr(self, p: int, reverse: bool) -> list:
        key = (p, reverse)
        hit = self._local_csr.get(key)
        if hit is None:
            g, a = self.g, self.assign
            sel = np.flatnonzero((a[g.src] == p) & (a[g.dst] == p))
            u, v = self.local[g.src[sel]], self.local[g.dst[sel]]
            if reverse:
                u, v = v, u
            size = len(self.layout.members[p])
            hit = [
                csr_matrix((g.costs[sel, x].astype(np.float64), (u, v)), shape=(size, size))
                for x in range(g.d)
            ]
            self._local_csr[key] = hit
        return hit

    def local_search(self, v: int, reverse: bool = False) -> np.ndarray:
        """Distances from (``reverse``: to) ``v`` inside its own subset's
        induced subgraph; shape ``(d, |V_p|)``."""
        p = int(self.assign[v])
        lv = int(self.local[v])
        return np.stack([dijkstra(m, directed=True, indices=lv) for m in self._subset_csr(p, reverse)])

    # -- bound tables -----------------------------------------------------------
    def bounds_from(self, s: int, *, full: bool = False) -> np.ndarray:
        """Φ(s, v) for every member of ``s``'s subset and every border vertex
        (all vertices with ``full``); other entries are ``inf`` until
        ``extend_from`` fills their subset."""
        lay, inner, inter = self.layout, self.inner, self.inter
        ps = int(self.assign[s])
        out = np.full((self.g.d, self.g.n), np.inf)
        own = self.local_search(s)
        if len(self.exits[ps]):
            head = inner.exit_cols[ps][:, self.local[s], :]  # (d, X): Φ(s, exit)
            if s in inter.row_pos:
                from_s = inter.phi[:, inter.row_pos[s], :]
            else:
                mid = inter.phi[:, [inter.row_pos[j] for j in lay.exits[ps]], :]
                from_s = (head[:, :, None] + mid).min(axis=1)  # (d, E), NaN in own columns
            other = self.assign[inter.cols] != ps
            out[:, inter.cols[other]] = from_s[:, other]
            if len(self.entries[ps]):
                back = (head[:, :, None] + inner.returns[ps]).min(axis=1)  # (d, E_p)
                ent = np.minimum(own[:, self.local[self.entries[ps]]], back)
                own = np.minimum(own, (ent[:, :, None] + inner.entry_rows[ps]).min(axis=1))
        out[:, lay.members[ps]] = own
        for p in range(lay.k):
            if p == ps or not len(self.entries[p]):
                continue
            if full:
                self.extend_from(out, p)
            elif len(self.exits[p]):
                rows = inner.entry_rows[p][:, :, self.loc_exits[p]]  # (d, E_p, X_p)
                via = (out[:, self.entries[p]][:, :, None] + rows).min(axis=1)
                out[:, self.exits[p]] = np.minimum(out[:, self.exits[p]], via)
        return out

    def extend_from(self, out: np.ndarray, p: int) -> None:
        """Fill Φ(s, v) for the members of subset ``p`` (not ``s``'s own)
        from the values already at its entries."""
        if not len(self.entries[p]):
            return
        mem = self.layout.members[p]
        via = (out[:, self.entries[p]][:, :, None] + self.inner.entry_rows[p]).min(axis=1)
        out[:, mem] = np.minimum(out[:, mem], via)

    def bounds_to(self, e: int, *, full: bool = False) -> np.ndarray:
        """Φ(v, e) for every member of ``e``'s subset and every border vertex
        (all vertices with ``full``); see ``extend_to``."""
        lay, inner, inter = self.layout, self.inner, self.inter
        pe = int(self.assign[e])
        out = np.full((self.g.d, self.g.n), np.inf)
        own = self.local_search(e, reverse=True)
        if len(self.entries[pe]):
            tail = inner.entry_rows[pe][:, :, self.local[e]]  # (d, E_p): Φ(entry, e)
            if len(inter.rows):
                mid = inter.phi[:, :, self.cols_of[pe]]  # (d, B, E_p)
                via = (mid + tail[:, None, :]).min(axis=2)
                other = self.assign[inter.rows] != pe
                out[:, inter.rows[other]] = via[:, other]
            if len(self.exits[pe]):
                back = (inner.returns[pe] + tail[:, None, :]).min(axis=2)  # (d, X_p)
                ext = np.minimum(own[:, self.loc_exits[pe]], back)
                own = np.minimum(own, (inner.exit_cols[pe] + ext[:, None, :]).min(axis=2))
        out[:, lay.members[pe]] = own
        if full:
            for p in range(lay.k):
                if p != pe:
                    self.extend_to(out, p)
        return out

    def extend_to(self, out: np.ndarray, p: int) -> None:
        """Fill Φ(v, e) for the members of subset ``p`` (not ``e``'s own)
        from the values already at its exits."""
        if not len(self.exits[p]):
            return
        mem = self.layout.members[p]
        via = (self.inner.exit_cols[p] + out[:, self.exits[p]][:, None, :]).min(axis=2)
        out[:, mem] = np.minimum(out[:, mem], via)

    # -- witnesses ---------------------------------------------------------------
    def witnesses(self, s: int, e: int, to_table: np.ndarray | None = None) -> tuple[Path, ...]:
        """One single-criterion shortest ``s -> e`` path per dimension
        (empty when ``e`` is unreachable).

        Each path walks down the exact distance-to-``e`` table, taking the
        neighbour with the smallest ``cost + Φ(w, e)`` (ties to the smaller
        id). ``to_table`` may be a table from ``bounds_to(e)``; it is extended
        in place as the walk enters new subsets.
        """
        g = self.g
        table = self.bounds_to(e) if to_table is None else to_table
        pe = int(self.assign[e])
        done = np.zeros(self.layout.k, dtype=bool)
        done[pe] = True
        ps = int(self.assign[s])
        if not done[ps]:
            self.extend_to(table, ps)
            done[ps] = True
        if not np.isfinite(table[0, s]):
            return ()
        assign = self._assign_list
        rows = [table[x] for x in range(g.d)]
        out = []
        for x in range(g.d):
            row = rows[x]
            seq = [s]
            seen = {s}
            v = s
            while v != e:
                best_val, best_w = INF, -1
                for w, c in g.out_adj[v]:
                    if w in seen:
                        continue
                    p = assign[w]
                    if not done[p]:
                        self.extend_to(table, p)
                        done[p] = True
                    val = c[x] + row[w]
                    if val < best_val or (val == best_val and w < best_w):
                        best_val, best_w = val, w
                if best_w < 0 or best_val == INF:
                    break
                seq.append(best_w)
                seen.add(best_w)
                v = best_w
            if v != e:
                # only zero-cost cycles can trap the walk; use a full search
                seq = self._search_witness(s, e, x)
            out.append(Path(tuple(seq), path_cost(g, seq)))
        return tuple(out)

    def _search_witness(self, s: int, e: int, x: int) -> list[int]:
        pred = self.search(s)[1][x]
        seq = [e]
        while seq[-1] != s:
            seq.append(int(pred[seq[-1]]))
        seq.reverse()
        return seq

    # -- single pair lookup ---------------------------------------------------------
    def _entry_row(self, p: int, i: int, v: int) -> np.ndarray:
        return self.inner.entry_rows[p][:, self.entry_idx[p][i], self.local[v]]

    def _exit_col(self, p: int, v: int, j: int) -> np.ndarray:
        return self.inner.exit_cols[p][:, self.local[v], self.exit_idx[p][j]]

    def lbop_vector(self, s: int, e: int) -> np.ndarray:
        """Φ(s, e) as a float array of length d."""
        d = self.g.d
        if s == e:
            return np.zeros(d)
        lay = self.layout
        ps, pe = lay.subset_of(s), lay.subset_of(e)
        if ps == pe:
            if s in self.entry_idx[ps]:
                return self._entry_row(ps, s, e).copy()
            if e in self.exit_idx[pe]:
                return self._exit_col(pe, s, e).copy()
            return self.bounds_from(s)[:, e].copy()
        entries_e = lay.entries[pe]
        if not entries_e:
            return np.full(d, np.inf)
        cols = [self.inter.col_pos[i] for i in entries_e]
        to_e = np.stack([self._entry_row(pe, i, e) for i in entries_e], axis=1)  # (d, E)
        if s in self.inter.row_pos:
            from_s = self.inter.phi[:, self.inter.row_pos[s], cols]  # (d, E)
        else:
            exits_s = lay.exits[ps]
            if not exits_s:
                return np.full(d, np.inf)
            head = np.stack([self._exit_col(ps, s, j) for j in exits_s], axis=1)  # (d, X)
            mid = self.inter.phi[:, [self.inter.row_pos[j] for j in exits_s], :][:, :, cols]
            from_s = (head[:, :, None] + mid).min(axis=1)  # (d, E)
        return (from_s + to_e).min(axis=1)


def compute_lbop(engine: LbopEngine, s: int, e: int, *, with_witnesses: bool = False) -> Lbop:
    """LBOP of ``(s, e)`` assembled from the index.

    Same subset: read the stored entry row or exit column (or search on
    demand when neither endpoint is a border). Different subsets: minimise
    over the entries of ``e``'s subset, first routing ``s`` through its own
    subset's exits when ``s`` is not a border.
    """
    phi = tuple(_scalar(x) for x in engine.lbop_vector(s, e))
    wit = engine.witnesses(s, e) if with_witnesses else None
    return Lbop(phi, wit)
