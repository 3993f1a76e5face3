"""Lower bounds and what they rule out.

For any pair of vertices the index can produce the per-dimension shortest
distance vector, a lower bound on every path between them. Each shortest
path is also a real route, so the best of them under the score gives an
upper bound tau. A vertex whose cheapest possible detour already scores
above tau cannot lie on the optimum, and the query drops it before searching.
"""

import numpy as np

from mcroute.bench import sample_pairs
from mcroute.graph import generate_road_graph
from mcroute.index import build_index
from mcroute.lbop import compute_lbop
from mcroute.query import build_shrunk_graph, query_optimal, vertex_filter
from mcroute.scoring import register_score_function

g = generate_road_graph(5000, 1.2, d=2, seed=3)
index = build_index(g, k=50, r=8, seed=3)
engine = index.engine(g)
f = register_score_function("sum_sq", g.d)

s, e = 40, 4321
lb = compute_lbop(engine, s, e, with_witnesses=True)
print(f"lower bound {s} -> {e}: {lb.phi}")
for x, path in enumerate(lb.witnesses):
    print(f"  shortest in cost {x}: {len(path.vertices)} vertices, cost {path.cost}, score {f(path.cost)}")

shrunk = build_shrunk_graph(index, g, s, e)
filt = vertex_filter(shrunk, index, s, e, f)
kept, left = int(shrunk.mask.sum()), int(filt.survivors.sum())
print(f"\ntau = {filt.tau}")
print(f"shrunk graph: {kept} vertices; after filtering: {left} ({1 - left / kept:.0%} removed)")

res = query_optimal(index, g, s, e, f)
print(f"optimum: score {res.score}, cost {res.cost}")
assert set(res.path.vertices) <= filt.surviving_set

fractions = [query_optimal(index, g, a, b, f).stats.filtered_fraction for a, b in sample_pairs(g, 20, 1)]
print(f"\nmean filtered fraction over 20 random pairs: {np.mean(fractions):.2f}")
