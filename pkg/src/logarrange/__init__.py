"""Multiscale solver for the generalized minimum logarithmic arrangement problem."""
from .arrangement import (Arrangement, apply_move, beta, cost, cost_delta_move, from_order,
                          legalize, read_permutation, write_permutation)
from .baselines import BASELINES, baseline, compare
from .estimator import LogArrangement
from .exceptions import ContractError, GraphFormatError, ValidationError
from .graph import (Graph, laplacian, parse_edge_list, read_edge_list, read_volumes, un,
                    write_edge_list)
from .solver import PRESETS, SolveResult, SolverParams, solve, solve_exhaustive, vcycle

__version__ = "0.1.0"

__all__ = [
    "Arrangement", "BASELINES", "ContractError", "Graph", "GraphFormatError",
    "LogArrangement", "PRESETS", "SolveResult", "SolverParams", "ValidationError",
    "apply_move", "baseline", "beta", "compare", "cost", "cost_delta_move", "from_order",
    "laplacian", "legalize", "parse_edge_list", "read_edge_list", "read_permutation",
    "read_volumes", "solve", "solve_exhaustive", "un", "vcycle", "write_edge_list",
    "write_permutation",
]
