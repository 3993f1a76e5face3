"""A first query, end to end.

We build a small road-like grid with two costs per edge (think distance and
travel time), index it, and ask for the route that minimises the sum of
squared costs. That score rewards balance: a route that is short but slow,
or fast but long, loses to one that is moderate on both.

Run with ``python demos/01_first_query.py``.
"""

from mcroute.graph import generate_grid_graph
from mcroute.index import build_index, index_sizes
from mcroute.oracle import bf_search_baseline
from mcroute.query import query_optimal
from mcroute.scoring import register_score_function

g = generate_grid_graph(2500, 10000, d=2, seed=7, correlation=0.5)
print(f"graph: {g.n} vertices, {g.m} edges, {g.d} costs per edge")

# k subsets, at most r contour groups per stored skyline
index = build_index(g, k=16, r=4, seed=0)
lay = index.layout
print(f"partition: {lay.k} subsets, {len(lay.borders)} border vertices, {lay.cut_edges} cut edges")
print(f"index: {index_sizes(index)['total']:,} bytes, {index.skyline.pair_count} entry-exit skylines")

f = register_score_function("sum_sq", g.d)
s, e = 12, 2400
res = query_optimal(index, g, s, e, f)
print(f"\nbest {s} -> {e}: cost {res.cost}, score {res.score}, {len(res.path.vertices)} vertices")
st = res.stats
print(f"  shrunk graph kept {st.shrunk_vertices} vertices, filtering left {st.surviving_vertices}")
print(f"  {st.expanded} labels expanded in {st.wall_time * 1000:.1f} ms")

# The same answer straight from the graph, with no index at all.
base = bf_search_baseline(g, s, e, f)
print(f"\nno-index search: score {base.score}, {base.stats.expanded} labels, {base.stats.wall_time * 1000:.1f} ms")
assert base.score == res.score

# A linear score is a plain shortest path on combined edge weights.
lin = register_score_function("weighted:1,3", g.d)
fast = query_optimal(index, g, s, e, lin)
print(f"\nweighted 1:3 -> cost {fast.cost} via {fast.stats.method}")
