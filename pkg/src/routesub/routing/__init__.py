from .oracle import (DEPOT, EMPTY, CostChain, CostOracle, RouteWitness, TabulatedCost, TourOracle,
                     TreeOracle, exact_steiner, exact_tsp, kmb_steiner, mst_double_tsp,
                     two_opt_improve, witness_valid)
from .steiner import EXACT_STEINER_LIMIT, SteinerDP, WeightedGraph, kmb_tree
from .tsp import EXACT_TSP_LIMIT, PointSet, SubsetTours

__all__ = [
    "DEPOT", "EMPTY", "CostChain", "CostOracle", "RouteWitness", "TabulatedCost", "TourOracle",
    "TreeOracle", "exact_steiner", "exact_tsp", "kmb_steiner", "mst_double_tsp", "two_opt_improve",
    "witness_valid", "EXACT_STEINER_LIMIT", "SteinerDP", "WeightedGraph", "kmb_tree",
    "EXACT_TSP_LIMIT", "PointSet", "SubsetTours",
]
