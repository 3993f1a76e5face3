"""Dominance primitives and complete skyline (Pareto) path sets.

Skyline paths are found by lexicographic label setting: partial paths are
popped from a heap in lexicographic cost order, so a popped label can never
be dominated by one popped later and becomes permanent at its vertex. With
non-negative costs every surviving label is a simple path.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .graph import CostVector, MultiCostGraph, Path, add_costs, weakly_dominates


class SkylineLimitExceeded(RuntimeError):
    """A skyline set grew past the configured cap."""


def dominates(a: CostVector, b: CostVector) -> bool:
    """True iff ``a <= b`` componentwise with at least one strict component."""
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    strict = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


def pareto_filter(costs: Sequence[CostVector]) -> list[int]:
    """Indices of the non-dominated, first-occurrence-unique cost vectors."""
    order = sorted(range(len(costs)), key=lambda i: (tuple(costs[i]), i))
    kept: list[int] = []
    for i in order:
        c = costs[i]
        if any(weakly_dominates(costs[j], c) for j in kept):
            continue
        kept.append(i)
    return sorted(kept, key=lambda i: tuple(costs[i]))


@dataclass(frozen=True)
class SkylinePathSet:
    pair: tuple[int, int]
    paths: tuple[Path, ...]

    @property
    def costs(self) -> list[CostVector]:
        return [p.cost for p in self.paths]

    def __len__(self) -> int:
        return len(self.paths)


class _Front:
    """Permanent labels of one vertex under lexicographic label setting.

    Every label tested against the front is lexicographically >= all of its
    members, so for two criteria only the smallest second cost matters.
    """

    __slots__ = ("d2", "best2", "items")

    def __init__(self, d: int):
        self.d2 = d == 2
        self.best2 = math.inf
        self.items: list[CostVector] = []

    def covers(self, c: CostVector) -> bool:
        if self.d2:
            return self.best2 <= c[1]
        for p in self.items:
            if all(x <= y for x, y in zip(p, c)):
                return True
        return False

    def add(self, c: CostVector) -> None:
        if self.d2:
            if c[1] < self.best2:
                self.best2 = c[1]
        else:
            self.items.append(c)


class LabelTree:
    """Parent-pointer forest of search labels; ``vertex`` holds original ids."""

    __slots__ = ("vertex", "parent")

    def __init__(self, vertex: np.ndarray, parent: np.ndarray):
        self.vertex = vertex
        self.parent = parent

    def path(self, label: int) -> tuple[int, ...]:
        out = []
        while label >= 0:
            out.append(int(self.vertex[label]))
            label = int(self.parent[label])
        return tuple(reversed(out))

    def __len__(self) -> int:
        return len(self.vertex)


def _label_setting(
    gp: MultiCostGraph,
    source: int,
    targets: set[int],
    *,
    stop_at_target: bool = False,
    bounds=None,
    seeds: Sequence[CostVector] = (),
    max_size: int | None = None,
):
    """Core search. Returns (vertex list, parent list, cost list, results)
    where ``results[t]`` lists label ids of the skyline at target ``t``."""
    d = gp.d
    zero = (0,) * d if gp.integral else (0.0,) * d
    fronts = [None] * gp.n
    lab_v = [source]
    lab_p = [-1]
    lab_c = [zero]
    results: dict[int, list[int]] = {t: [] for t in targets}
    confirmed: list[CostVector] = list(seeds)
    out_adj = gp.out_adj
    heap = [(zero, 0)]
    push, pop = heapq.heappush, heapq.heappop

    def pruned_by_bound(v: int, c: CostVector) -> bool:
        lb = bounds[v]
        if any(x == math.inf for x in lb):
            return True
        est = tuple(x + y for x, y in zip(c, lb))
        return any(all(r <= e for r, e in zip(res, est)) for res in confirmed)

    while heap:
        cost, lid = pop(heap)
        v = lab_v[lid]
        front = fronts[v]
        if front is None:
            front = fronts[v] = _Front(d)
        elif front.covers(cost):
            continue
        front.add(cost)
        if v in results:
            if bounds is not None and any(all(r <= x for r, x in zip(res, cost)) for res in confirmed):
                continue
            results[v].append(lid)
            if bounds is not None:
                confirmed.append(cost)
            if max_size is not None and len(results[v]) > max_size:
                raise SkylineLimitExceeded(
                    f"skyline set for pair ({source},{v}) exceeds {max_size} paths"
                )
            if stop_at_target:
                continue
        if bounds is not None and pruned_by_bound(v, cost):
            continue
        for w, c in out_adj[v]:
            nc = tuple(x + y for x, y in zip(cost, c))
            fw = fronts[w]
            if fw is not None and fw.covers(nc):
                continue
            if bounds is not None and pruned_by_bound(w, nc):
                continue
            lab_v.append(w)
            lab_p.append(lid)
            lab_c.append(nc)
            push(heap, (nc, len(lab_v) - 1))
    return lab_v, lab_p, lab_c, results


def _label_setting_2d(gp: MultiCostGraph, source: int, targets: set[int], max_size: int | None = None):
    """Two-criterion ``_label_setting`` without bounds or early stops.

    Same lexicographic pop order (first cost, second cost, label id), so the
    labels and results are identical; costs live in two flat lists.
    """
    zero = 0 if gp.integral else 0.0
    adj = gp.__dict__.get("_adj2")
    if adj is None:
        adj = gp._adj2 = [[(w, c[0], c[1]) for w, c in gp.out_adj[u]] for u in range(gp.n)]
    best2 = [math.inf] * gp.n
    lab_v, lab_p, c0, c1 = [source], [-1], [zero], [zero]
    results: dict[int, list[int]] = {t: [] for t in targets}
    heap = [(zero, zero, 0)]
    push, pop = heapq.heappush, heapq.heappop
    while heap:
        a, b, lid = pop(heap)
        v = lab_v[lid]
        if best2[v] <= b:
            continue
        best2[v] = b
        hits = results.get(v)
        if hits is not None:
            hits.append(lid)
            if max_size is not None and len(hits) > max_size:
                raise SkylineLimitExceeded(
                    f"skyline set for pair ({source},{v}) exceeds {max_size} paths"
                )
        for w, x, y in adj[v]:
            nb = b + y
            if best2[w] <= nb:
                continue
            lab_v.append(w)
            lab_p.append(lid)
            c0.append(a + x)
            c1.append(nb)
            push(heap, (a + x, nb, len(lab_v) - 1))
    return lab_v, lab_p, list(zip(c0, c1)), results


def _lex_shortest(gp: MultiCostGraph, source: int, target: int, first: int):
    """Lexicographically shortest path with dimension ``first`` leading.

    Such a path is always a skyline path.
    """
    d = gp.d
    order = [first] + [x for x in range(d) if x != first]
    key0 = tuple(0 for _ in order)
    best = {source: key0}
    parent = {source: -1}
    heap = [(key0, source)]
    done = set()
    while heap:
        key, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        if v == target:
            break
        for w, c in gp.out_adj[v]:
            nk = tuple(key[i] + c[x] for i, x in enumerate(order))
            if w not in best or nk < best[w]:
                best[w] = nk
                parent[w] = v
                heapq.heappush(heap, (nk, w))
    if target not in done:
        return None
    seq = []
    v = target
    while v >= 0:
        seq.append(v)
        v = parent[v]
    seq.reverse()
    cost = [0] * d
    for i, x in enumerate(order):
        cost[x] = best[target][i]
    return tuple(seq), tuple(cost)


def compute_skyline_paths(
    gp: MultiCostGraph,
    entry: int,
    exit: int,
    bounds: Mapping[int, CostVector] | Sequence[CostVector] | None = None,
    *,
    max_size: int | None = None,
) -> SkylinePathSet:
    """All mutually non-dominated simple ``entry -> exit`` paths in ``gp``.

    ``bounds[v]`` may give a componentwise lower bound on any ``v -> exit``
    path cost; it enables bound pruning and seeds the result set with the
    per-dimension lexicographic shortest paths. Only one path is kept per
    distinct cost vector. Vertex ids in the result are those of ``gp``.
    """
    if not (0 <= entry < gp.n and 0 <= exit < gp.n):
        raise ValueError("entry/exit not in graph")
    if entry == exit:
        zero = (0,) * gp.d if gp.integral else (0.0,) * gp.d
        return SkylinePathSet((entry, exit), (Path((entry,), zero),))
    seeds = []
    if bounds is not None:
        for x in range(gp.d):
            found = _lex_shortest(gp, entry, exit, x)
            if found is None:
                return SkylinePathSet((entry, exit), ())
            if found not in seeds:
                seeds.append(found)
    lab_v, lab_p, lab_c, results = _label_setting(
        gp, entry, {exit}, stop_at_target=True, bounds=bounds,
        seeds=[c for _, c in seeds], max_size=max_size,
    )
    tree = LabelTree(lab_v, lab_p)
    paths = [Path(seq, cost) for seq, cost in seeds]
    paths += [Path(tree.path(lid), lab_c[lid]) for lid in results[exit]]
    paths.sort(key=lambda p: (p.cost, p.vertices))
    return SkylinePathSet((entry, exit), tuple(paths))


@dataclass
class SkylineFan:
    """Skyline sets from one source to several targets sharing a label tree.

    ``tree.vertex`` uses ids of the parent graph when ``gp.origin`` is set.
    ``labels[t]``/``costs[t]`` give, per target, the label ids and an
    ``(count, d)`` cost array sorted lexicographically.
    """

    source: int
    tree: LabelTree
    labels: dict[int, np.ndarray]
    costs: dict[int, np.ndarray]

    def paths(self, target: int) -> list[Path]:
        return [
            Path(self.tree.path(int(l)), tuple(c.tolist()))
            for l, c in zip(self.labels[target], self.costs[target])
        ]


def skyline_fan(
    gp: MultiCostGraph, source: int, targets: Sequence[int], *, max_size: int | None = None
) -> SkylineFan:
    """One-to-many skyline sets inside ``gp``; ids are local to ``gp`` on input.

    The label tree is compacted to ancestors of result labels and its vertex
    ids are translated through ``gp.origin``.
    """
    tset = {t for t in targets if t != source}
    if gp.d == 2:
        lab_v, lab_p, lab_c, results = _label_setting_2d(gp, source, tset, max_size)
    else:
        lab_v, lab_p, lab_c, results = _label_setting(gp, source, tset, max_size=max_size)
    keep = np.zeros(len(lab_v), dtype=bool)
    for lids in results.values():
        for lid in lids:
            while lid >= 0 and not keep[lid]:
                keep[lid] = True
                lid = lab_p[lid]
    remap = np.full(len(lab_v), -1, dtype=np.int64)
    remap[keep] = np.arange(int(keep.sum()))
    kept = np.flatnonzero(keep)
    verts = np.asarray(lab_v, dtype=np.int64)[kept]
    if gp.origin is not None:
        verts = gp.origin[verts]
    parents = np.asarray(lab_p, dtype=np.int64)[kept]
    parents = np.where(parents >= 0, remap[np.maximum(parents, 0)], -1)
    dtype = np.int64 if gp.integral else np.float64
    labels, costs = {}, {}
    for t in sorted(tset):
        lids = results[t]
        labels[t] = remap[np.asarray(lids, dtype=np.int64)] if lids else np.zeros(0, np.int64)
        costs[t] = np.asarray([lab_c[l] for l in lids], dtype=dtype).reshape(len(lids), gp.d)
    return SkylineFan(
        source, LabelTree(verts.astype(np.int32), parents.astype(np.int32)), labels, costs
    )
