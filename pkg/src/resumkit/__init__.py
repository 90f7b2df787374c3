"""Constructive weights of (graph, spanning tree) pairs, forest-formula
positivity, Symanzik amplitudes and loop-vertex-expansion bookkeeping for
zero-dimensional phi^4."""

from .graph import (Edge, Multigraph, canonical_key, contract_edge, delete_edge, is_connected,
                    tree_path)
from .weights import (ConstructiveWeight, DeletionContraction, enumerate_spanning_trees,
                      kruskal_leading_tree, simplex_monomial_integral, weight_bruteforce,
                      weight_deletion_contraction, weight_monte_carlo, weight_symbolic, weight_table)

__version__ = "0.1.0"

__all__ = [
    "ConstructiveWeight", "DeletionContraction", "Edge", "Multigraph", "canonical_key",
    "contract_edge", "delete_edge", "enumerate_spanning_trees", "is_connected",
    "kruskal_leading_tree", "simplex_monomial_integral", "tree_path", "weight_bruteforce",
    "weight_deletion_contraction", "weight_monte_carlo", "weight_symbolic", "weight_table",
]
