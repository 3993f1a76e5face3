"""Contour skylines: compress a skyline set into r componentwise-minimum points.

The points of a skyline set are split into r groups so that the largest
within-group Euclidean distance (the partition diameter) is small; each
group is then summarised by its componentwise minimum, which lower-bounds
every member. In two dimensions the optimal split into contiguous runs of
the x-sorted skyline is found by dynamic programming; in higher dimensions
a farthest-point greedy gives a 2-approximation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import CostVector
from .skyline import dominates


@dataclass(frozen=True)
class ContourGroup:
    members: tuple[int, ...]
    contour_point: CostVector


@dataclass(frozen=True)
class ContourSkylineSet:
    groups: tuple[ContourGroup, ...]
    r: int
    achieved_diameter: float

    @property
    def points(self) -> list[CostVector]:
        return [grp.contour_point for grp in self.groups]

    def labels(self, size: int) -> np.ndarray:
        """Group id of every skyline member."""
        out = np.full(size, -1, dtype=np.int64)
        for gid, grp in enumerate(self.groups):
            out[list(grp.members)] = gid
        return out


def _as_array(points) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2:
        arr = arr.reshape(len(points), -1)
    return arr


def _pairwise(arr: np.ndarray) -> np.ndarray:
    diff = arr[:, None, :] - arr[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def group_diameter(points: Sequence[CostVector]) -> float:
    """Largest pairwise Euclidean distance; 0 for a single point."""
    if len(points) == 0:
        raise ValueError("diameter of an empty group is undefined")
    return float(_pairwise(_as_array(points)).max())


def partition_diameter(points: Sequence[CostVector], groups: Sequence[Sequence[int]]) -> float:
    arr = _as_array(points)
    return max(float(_pairwise(arr[list(grp)]).max()) for grp in groups)


def contour_points(groups: Sequence[Sequence[int]], costs: Sequence[CostVector]) -> list[CostVector]:
    """Componentwise minimum of each group's member costs."""
    out = []
    for grp in groups:
        if not grp:
            raise ValueError("empty group")
        out.append(tuple(min(costs[i][x] for i in grp) for x in range(len(costs[grp[0]]))))
    return out


def _finish(groups: list[list[int]], costs, r: int, diameter: float) -> ContourSkylineSet:
    cps = contour_points(groups, costs)
    return ContourSkylineSet(
        tuple(ContourGroup(tuple(sorted(grp)), cp) for grp, cp in zip(groups, cps)),
        r,
        float(diameter),
    )


def _range_diameters(arr: np.ndarray) -> np.ndarray:
    """``out[j, i]`` = diameter of the run ``j..i`` (inclusive).

    ``reach[j, i]`` is the farthest any of ``j..i`` lies from ``i``; the run
    diameter is its running maximum over ``i``.
    """
    upper = np.triu(_pairwise(arr))
    reach = np.maximum.accumulate(upper[::-1], axis=0)[::-1]
    return np.maximum.accumulate(reach, axis=1)


def contour_partition_2d(
    points: Sequence[CostVector], r: int, *, check: bool = True
) -> ContourSkylineSet:
    """Optimal split of a 2D skyline into at most ``r`` contiguous runs.

    ``best[t][i]`` is the smallest diameter achievable for the first ``i``
    sorted points using ``t`` runs; the last run starts at the minimising
    split point (smallest one on ties).
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    costs = [tuple(p) for p in points]
    m = len(costs)
    if m == 0:
        return ContourSkylineSet((), r, 0.0)
    if any(len(c) != 2 for c in costs):
        raise ValueError("contour_partition_2d needs two-dimensional points")
    if check:
        for a in range(m):
            for b in range(m):
                if a != b and dominates(costs[a], costs[b]):
                    raise ValueError(f"point {costs[b]} is dominated by {costs[a]}; not a skyline")
    order = sorted(range(m), key=lambda i: (costs[i], i))
    if r >= m:
        return _finish([[i] for i in order], costs, r, 0.0)
    arr = _as_array([costs[i] for i in order])
    diam = _range_diameters(arr)
    t_max = r
    best = np.full((t_max + 1, m + 1), np.inf)
    split = np.zeros((t_max + 1, m + 1), dtype=np.int64)
    best[1, 1:] = diam[0, :]
    # last[i - 1, j] = diameter of a final run j..i-1; infinite unless j < i
    last = np.where(np.tril(np.ones((m, m), dtype=bool)), diam.T, np.inf)
    for t in range(2, t_max + 1):
        cand = np.maximum(best[t - 1, :m][None, :], last)
        cand[:, : t - 1] = np.inf
        pos = np.argmin(cand, axis=1)
        best[t, 1:] = cand[np.arange(m), pos]
        split[t, 1:] = pos
    groups = []
    i = m
    for t in range(t_max, 0, -1):
        j = int(split[t, i]) if t > 1 else 0
        groups.append([order[x] for x in range(j, i)])
        i = j
    groups.reverse()
    return _finish(groups, costs, r, best[t_max, m])


def contour_partition_greedy(
    points: Sequence[CostVector], r: int, seed: int = 0, *, warn: bool = True
) -> ContourSkylineSet:
    """Farthest-point grouping with base points.

    The first base point is the one with the smallest first coordinate when
    ``seed == 0``, otherwise a seeded random pick. Each new group is founded
    by the point farthest from its own group's base point; every point at
    least as close to the new base as to its current base joins it.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    costs = [tuple(p) for p in points]
    m = len(costs)
    if m == 0:
        return ContourSkylineSet((), r, 0.0)
    if r > m:
        if warn:
            warnings.warn(f"r={r} exceeds the {m} points; clamped", stacklevel=2)
        r_eff = m
    else:
        r_eff = r
    arr = _as_array(costs)
    if seed == 0:
        first = min(range(m), key=lambda i: (costs[i][0], i))
    else:
        first = int(np.random.default_rng(seed).integers(m))
    owner = np.zeros(m, dtype=np.int64)
    to_base = np.sqrt(((arr - arr[first]) ** 2).sum(axis=1))
    for gid in range(1, r_eff):
        far = int(np.argmax(to_base))
        if to_base[far] == 0:
            break
        from_new = np.sqrt(((arr - arr[far]) ** 2).sum(axis=1))
        move = from_new <= to_base
        owner[move] = gid
        to_base[move] = from_new[move]
    groups = [list(np.flatnonzero(owner == gid)) for gid in range(int(owner.max()) + 1)]
    groups = [[int(i) for i in grp] for grp in groups if grp]
    return _finish(groups, costs, r, partition_diameter(costs, groups))


def compute_contour(costs: Sequence[CostVector], r: int, seed: int = 0) -> ContourSkylineSet:
    """Pick the right construction for the dimensionality; ``r`` is clamped
    to the set size."""
    m = len(costs)
    if m == 0:
        return ContourSkylineSet((), r, 0.0)
    d = len(costs[0])
    if m <= r:
        return _finish([[i] for i in range(m)], [tuple(c) for c in costs], r, 0.0)
    if d == 1:
        return _finish([list(range(m))], [tuple(c) for c in costs], r, group_diameter(costs))
    if d == 2:
        return contour_partition_2d(costs, r, check=False)
    return contour_partition_greedy(costs, r, seed, warn=False)
