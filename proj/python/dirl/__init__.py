"""Damped iteratively reweighted l1/l2 solvers and stationary-point analysis."""

import json as _json

from ._core import (
    ArgumentError,
    DomainError,
    FixedPointJacobian,
    NumericalFailure,
    ParseError,
    PreconditionError,
    Problem,
    Regularizer,
    SolverConfig,
    SolveTrace,
    benchmark2d,
    dirl1_weights,
    dirl2_weights,
    finite_difference_jacobian,
    fixed_point_jacobian,
    load_problem,
    map_jacobian,
    run,
    soft_threshold,
    subproblem_map,
    validate_config,
)
from . import _core


def stationarity_residual(problem, x, tol_support=1e-10, tol=1e-6):
    """Stationarity report as a dict (infinite margins come back as "inf")."""
    return _json.loads(_core._stationarity(problem, x, tol_support, tol))


def classify_stationary_point(problem, x, tol_support=1e-10, delta=1e-8):
    """Saddle report as a dict; raises PreconditionError off stationary points."""
    return _json.loads(_core._classify(problem, x, tol_support, delta))


def run_escape(config, workers=1):
    """Runs an escape experiment from a config dict and returns the summary dict."""
    return _json.loads(_core._escape(_json.dumps(config), workers))


def selfcheck(seed=20240601):
    """List of (name, passed, detail) for every property suite."""
    return _core._selfcheck(seed)


__all__ = [
    "ArgumentError",
    "DomainError",
    "FixedPointJacobian",
    "NumericalFailure",
    "ParseError",
    "PreconditionError",
    "Problem",
    "Regularizer",
    "SolverConfig",
    "SolveTrace",
    "benchmark2d",
    "classify_stationary_point",
    "dirl1_weights",
    "dirl2_weights",
    "finite_difference_jacobian",
    "fixed_point_jacobian",
    "load_problem",
    "map_jacobian",
    "run",
    "run_escape",
    "selfcheck",
    "soft_threshold",
    "stationarity_residual",
    "subproblem_map",
    "validate_config",
]
