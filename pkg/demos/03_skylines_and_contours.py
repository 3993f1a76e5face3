"""Inside one subset: skylines and their contours.

Between an entry and an exit of a subset the index keeps every
non-dominated path (the skyline). Searching them one at a time would be
slow, so they are clustered into at most r groups; each group is summarised
by its contour point, the componentwise minimum of its members. A group is
opened only when its contour point could still beat the incumbent.
"""

from mcroute.contour import compute_contour, contour_partition_greedy
from mcroute.graph import generate_grid_graph
from mcroute.index import build_index

g = generate_grid_graph(1600, 6400, d=2, seed=5)
index = build_index(g, k=4, r=3, seed=0)

# pick the entry-exit pair with the largest skyline
sk = index.skyline
entry, exit, _ = max(sk.pairs(), key=lambda t: len(sk.costs(t[2])))
sky = index.skyline_set(entry, exit)
costs = sorted(sky.costs)
print(f"skyline {entry} -> {exit}: {len(sky)} paths, from {costs[0]} to {costs[-1]}")

contour = index.contour_set(entry, exit)
print(f"\n{len(contour.groups)} contour groups (r = {index.r}):")
for grp in contour.groups:
    members = sorted(sky.paths[t].cost for t in grp.members)
    print(f"  contour point {grp.contour_point}: {len(members)} paths, {members[0]} .. {members[-1]}")

# In two dimensions the grouping is an exact dynamic program over the
# sorted skyline; with more dimensions a farthest-point greedy is used.
exact = compute_contour(sky.costs, 3)
print(f"\nexact 2D grouping: largest group diameter {exact.achieved_diameter:.2f}")
points3 = [(c[0], c[1], c[0] + c[1]) for c in sky.costs]
greedy = contour_partition_greedy(points3, 3)
print(f"greedy grouping of a 3D lift: largest group diameter {greedy.achieved_diameter:.2f}")
