"""Order polytopes as projections of network flow polytopes.

Builds the linear, weak, interval and semiorder networks, projects their
paths onto pair space, and solves distance and likelihood problems over the
resulting polytopes with an away-step Frank-Wolfe method.
"""

from .errors import (ArcNotInNetworkError, CapExceededError, DegeneratePriorError,
                     DimensionMismatchError, IncompatibleDataError,
                     InternalVerificationError, InvalidPathError, NonFiniteObjectiveError,
                     NotAnOrderError, OrderflowError)
from .flowpoly import (canonical_description, decode_path, enumerate_paths, is_flow,
                       path_count, path_to_flow, shortest_path_lmo)
from .networks import Network, NodeKey, build_network
from .optim import (SolverConfig, SolveResult, fit_mle, membership_distance,
                    minimize_over_flow_polytope)
from .projections import ProjectionMap, build_projection
from .relations import (OrderKind, Relation, characteristic_vector, enumerate_orders,
                        interval_representation, is_order)
from .stats import (BayesConfig, BayesFactorResult, ChoiceData, bayes_factor,
                    log_likelihood, log_likelihood_gradient, simulate_choices)

__version__ = "0.1.0"

__all__ = [
    "ArcNotInNetworkError", "BayesConfig", "BayesFactorResult", "CapExceededError",
    "ChoiceData", "DegeneratePriorError", "DimensionMismatchError", "IncompatibleDataError",
    "InternalVerificationError", "InvalidPathError", "Network", "NodeKey",
    "NonFiniteObjectiveError", "NotAnOrderError", "OrderKind", "OrderflowError",
    "ProjectionMap", "Relation", "SolveResult", "SolverConfig", "bayes_factor",
    "build_network", "build_projection", "canonical_description", "characteristic_vector",
    "decode_path", "enumerate_orders", "enumerate_paths", "fit_mle", "interval_representation",
    "is_flow", "is_order", "log_likelihood", "log_likelihood_gradient", "membership_distance",
    "minimize_over_flow_polytope", "path_count", "path_to_flow", "shortest_path_lmo",
    "simulate_choices",
]
