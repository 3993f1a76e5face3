import warnings

import numpy as np
import pytest

from mcroute.contour import (
    compute_contour, contour_partition_2d, contour_partition_greedy, group_diameter,
    partition_diameter,
)
from mcroute.oracle import contiguous_split_optimum, optimal_partition_diameter
from mcroute.skyline import pareto_filter


def _skyline(rng, m, d):
    pts = [tuple(int(x) for x in rng.integers(0, 50, size=d)) for _ in range(5 * m)]
    return [pts[i] for i in pareto_filter(pts)][:m]


def test_diameters():
    assert group_diameter([(0, 0)]) == 0
    assert group_diameter([(0, 0), (3, 4), (1, 1)]) == 5
    assert partition_diameter([(0, 0), (3, 4), (6, 8)], [[0], [1, 2]]) == 5


def test_contour_points_bound_their_members():
    rng = np.random.default_rng(0)
    for d in (2, 3, 4):
        for _ in range(30):
            pts = _skyline(rng, 9, d)
            cs = compute_contour(pts, 3)
            assert sorted(i for grp in cs.groups for i in grp.members) == list(range(len(pts)))
            for grp in cs.groups:
                assert grp.contour_point == tuple(min(pts[i][x] for i in grp.members) for x in range(d))


def test_2d_dp_groups_are_contiguous_runs_and_optimal():
    rng = np.random.default_rng(1)
    for _ in range(60):
        pts = _skyline(rng, int(rng.integers(2, 11)), 2)
        for r in (1, 2, 3):
            cs = contour_partition_2d(pts, r)
            assert cs.achieved_diameter == contiguous_split_optimum(pts, r)
            assert cs.achieved_diameter == partition_diameter(pts, [g.members for g in cs.groups])
            order = sorted(range(len(pts)), key=lambda i: pts[i])
            rank = {i: j for j, i in enumerate(order)}
            for grp in cs.groups:
                ranks = sorted(rank[i] for i in grp.members)
                assert ranks == list(range(ranks[0], ranks[-1] + 1))


def test_2d_dp_rejects_dominated_input():
    with pytest.raises(ValueError, match="dominated"):
        contour_partition_2d([(1, 1), (2, 2)], 1)
    with pytest.raises(ValueError):
        contour_partition_2d([(1, 1, 1)], 1)


def test_greedy_is_within_twice_the_optimum():
    rng = np.random.default_rng(2)
    for _ in range(80):
        pts = _skyline(rng, int(rng.integers(2, 10)), 3)
        r = int(rng.integers(1, 4))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            got = contour_partition_greedy(pts, r).achieved_diameter
        assert got <= 2 * optimal_partition_diameter(pts, r) + 1e-9


def test_greedy_clamps_r_with_a_warning():
    with pytest.warns(UserWarning, match="clamped"):
        cs = contour_partition_greedy([(1, 5, 2), (5, 1, 2)], 4)
    assert len(cs.groups) == 2 and cs.achieved_diameter == 0


def test_compute_contour_small_sets_are_exact():
    pts = [(1, 9), (4, 4), (9, 1)]
    cs = compute_contour(pts, 8)
    assert cs.points == pts and cs.achieved_diameter == 0
    assert compute_contour([], 3).groups == ()
    one_d = compute_contour([(1,), (2,), (5,)], 2)
    assert one_d.points == [(1,)]


def test_exact_partition_oracle_on_known_case():
    pts = [(0, 10), (1, 9), (9, 1), (10, 0)]
    assert optimal_partition_diameter(pts, 2) == pytest.approx(2 ** 0.5)
    assert optimal_partition_diameter(pts, 4) == 0
