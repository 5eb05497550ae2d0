"""Nonmonotone submodular maximization under routing-cost budgets."""
from .baselines import rand_baseline, rmax_baseline
from .errors import (DomainError, IllConditionedCovariance, InfeasibleError, ParameterError,
                     PreconditionError, RoutesubError, SizeError)
from .optimizer import Instance, Solution, default_k, deterministic_usm, solve, stage_one

__version__ = "0.1.0"

__all__ = [
    "DomainError", "IllConditionedCovariance", "InfeasibleError", "Instance", "ParameterError",
    "PreconditionError", "RoutesubError", "SizeError", "Solution", "default_k",
    "deterministic_usm", "rand_baseline", "rmax_baseline", "solve", "stage_one",
]
