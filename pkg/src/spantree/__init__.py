"""Embedding bounded-degree spanning trees in dense graphs, with exact oracles and
random-graph threshold experiments."""

from .embedders import (
    EmbedReport,
    Embedding,
    EmbeddingFailure,
    embed_high_range,
    embed_low_range,
    embed_tree,
    embed_with_bare_paths,
    embed_with_spread_leaves,
    verify_embedding,
)
from .graph_core import Graph, GraphFormatError, RegimeError, gnp_sample, graph_from_edge_list, regime_params, tail_bound
from .hamilton import dirac_hamilton_cycle, is_hamilton_cycle
from .matching import HallInstance, HallViolator, StarAssignment, perfect_matching, star_matching
from .oracle import OracleStatus, contains_spanning_tree, has_dominating_set_of_size
from .trees import Tree, build_extremal, dichotomy, random_tree_bounded_degree, tree_from_edge_list

__all__ = [
    "EmbedReport", "Embedding", "EmbeddingFailure", "Graph", "GraphFormatError", "HallInstance",
    "HallViolator", "OracleStatus", "RegimeError", "StarAssignment", "Tree", "build_extremal",
    "contains_spanning_tree", "dichotomy", "dirac_hamilton_cycle", "embed_high_range", "embed_low_range",
    "embed_tree", "embed_with_bare_paths", "embed_with_spread_leaves", "gnp_sample", "graph_from_edge_list",
    "has_dominating_set_of_size", "is_hamilton_cycle", "perfect_matching", "random_tree_bounded_degree",
    "regime_params", "star_matching", "tail_bound", "tree_from_edge_list", "verify_embedding",
]
