"""Adaptive mirror descent for convex programs with functional constraints."""
from .exceptions import (
    InfeasibilityCertificate,
    InfeasibleReference,
    InvalidArgument,
    IterationCapReached,
    MDOptError,
    TheoryContradiction,
    UnsupportedGeometry,
)
from .oracles import ConstraintOracle, FunctionOracle, linear_oracle, max_oracle, max_violated, quadratic_oracle
from .problems import PROBLEM_IDS, Problem, compute_reference, get_problem
from .prox import FeasibleSet, ProxSetup, ball, box, bregman, euclidean_setup, mirror_step, project, shifted_scaled, whole_space
from .restarts import RestartReport, contraction_audit, solve_restarted
from .solvers import (
    RunResult,
    StepRecord,
    solve_adaptive,
    solve_lipschitz,
    solve_multi_constraint,
    solve_partially_adaptive,
    v_f,
)

__version__ = "0.1.0"

__all__ = [
    "MDOptError", "InvalidArgument", "UnsupportedGeometry", "InfeasibleReference",
    "InfeasibilityCertificate", "TheoryContradiction", "IterationCapReached",
    "FunctionOracle", "ConstraintOracle", "max_oracle", "quadratic_oracle", "linear_oracle",
    "max_violated", "Problem", "PROBLEM_IDS", "get_problem", "compute_reference",
    "FeasibleSet", "ProxSetup", "ball", "box", "whole_space", "project", "euclidean_setup",
    "bregman", "mirror_step", "shifted_scaled", "RestartReport", "solve_restarted",
    "contraction_audit", "RunResult", "StepRecord", "solve_adaptive", "solve_partially_adaptive",
    "solve_lipschitz", "solve_multi_constraint", "v_f",
]
