"""Distributed fixed-point solvers for linear systems over directed networks."""

from .consensus import WeightMatrix, metropolis_weights, validate_weights
from .errors import (ConfigError, DivergenceError, DomainError, InvalidParameterError,
                     WeightValidationError)
from .fixedpoint import (FixedPointMap, centralized_iterate, contraction_bound, jor_map,
                         paper_relaxation)
from .graph import (Graph, GraphSequence, compose, compose_sequence, diameter, graph_power,
                    is_jointly_connected, is_repeatedly_jointly_strongly_connected,
                    is_strongly_connected, make_geometric_graph, make_regular_graph,
                    sample_subgraph)
from .metrics import CostModel, cost_model, flops_per_iteration, traffic_per_iteration
from .problems import (KrigingField, LinearSystem, gaussian_kernel, kriging_predict,
                       make_kriging_system, make_sdd_system)
from .solvers import (AgentStates, RunTrace, default_initialization, dfix_step, run_dfix,
                      run_harnessing, run_projection, termination_check)

__version__ = "0.1.0"
