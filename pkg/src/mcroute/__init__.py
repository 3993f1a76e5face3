"""Optimal routes on multi-cost graphs with a partition-based index.

Typical use::

    from mcroute import generate_grid_graph, build_index, query_optimal, register_score_function

    g = generate_grid_graph(2000, 10000, d=2, seed=1)
    index = build_index(g, k=20, r=8)
    f = register_score_function("sum_sq", g.d)
    result = query_optimal(index, g, 0, 1999, f)
"""

from .contour import ContourGroup, ContourSkylineSet, compute_contour
from .graph import (
    GraphFormatError, MultiCostGraph, Path, generate_density_graph, generate_grid_graph,
    generate_random_graph, generate_road_graph, induced_subgraph, load_graph, path_cost, save_graph,
)
from .index import (
    IndexFormatError, PartitionIndex, build_index, index_sizes, load_index, save_index,
    serialize_all_pairs_skyline, serialize_index,
)
from .lbop import Lbop, LbopEngine, build_inter_index, build_lbop_inner_index, compute_lbop
from .oracle import bf_search_baseline, oracle_optimal_path, oracle_skyline_set
from .partition import PartitionError, PartitionLayout, compute_borders, load_partition, partition_graph, save_partition
from .query import QueryResult, QueryStats, build_shrunk_graph, query_optimal, vertex_filter
from .scoring import ScoreFunction, ScoreFunctionError, register_score_function
from .skyline import SkylineLimitExceeded, SkylinePathSet, compute_skyline_paths

__version__ = "0.1.0"

__all__ = [
    "ContourGroup", "ContourSkylineSet", "compute_contour",
    "GraphFormatError", "MultiCostGraph", "Path", "generate_density_graph", "generate_grid_graph",
    "generate_random_graph", "generate_road_graph", "induced_subgraph", "load_graph", "path_cost",
    "save_graph",
    "IndexFormatError", "PartitionIndex", "build_index", "index_sizes", "load_index", "save_index",
    "serialize_all_pairs_skyline", "serialize_index",
    "Lbop", "LbopEngine", "build_inter_index", "build_lbop_inner_index", "compute_lbop",
    "bf_search_baseline", "oracle_optimal_path", "oracle_skyline_set",
    "PartitionError", "PartitionLayout", "compute_borders", "load_partition", "partition_graph",
    "save_partition",
    "QueryResult", "QueryStats", "build_shrunk_graph", "query_optimal", "vertex_filter",
    "ScoreFunction", "ScoreFunctionError", "register_score_function",
    "SkylineLimitExceeded", "SkylinePathSet", "compute_skyline_paths",
]
