"""Conical potential flow on the unit sphere: solver and comparison checks."""

import json

from ._conflow import (
    ConfigError,
    Error,
    FlowState,
    GasModel,
    Grid,
    NotEllipticError,
    ParseError,
    VacuumError,
    __version__,
    classify_state,
    convexity_hessian,
    density,
    density_partials,
    eigen_ratio,
    eval_expression,
    h_matrix,
    pseudo_mach_sq,
    residual,
    run_scenario,
    sound_speed_sq,
)
from . import _conflow


def certify(gas, grid, field, eps=1e-3):
    """Uniform ellipticity certificate of a field as a dict."""
    return json.loads(_conflow._certify(gas, grid, field, eps))


def solve(gas, grid, boundary, source=None, newton_tol=1e-10):
    """Solve N phi = source with Dirichlet data; returns (solution, report)."""
    solution, report = _conflow._solve(gas, grid, boundary, source, newton_tol)
    return solution, json.loads(report)


def compare(gas, grid, minus, plus):
    """Weak comparison report for a sub/supersolution pair as a dict."""
    return json.loads(_conflow._compare(gas, grid, minus, plus))


__all__ = [
    "ConfigError", "Error", "FlowState", "GasModel", "Grid", "NotEllipticError",
    "ParseError", "VacuumError", "__version__", "certify", "classify_state", "compare",
    "convexity_hessian", "density", "density_partials", "eigen_ratio", "eval_expression",
    "h_matrix", "pseudo_mach_sq", "residual", "run_scenario", "solve", "sound_speed_sq",
]
