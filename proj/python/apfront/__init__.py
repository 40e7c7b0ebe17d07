"""Spreading speeds of 1-D Fisher-KPP fronts in almost periodic media.

Thin re-export of the compiled core: torus-lift coefficient functions,
generalized principal eigenvalues lambda(L, p) with their L -> 0 and
L -> infinity limits, spreading speeds, and a direct IMEX simulation.
"""

from apfront._core import (  # noqa: F401
    APFunction,
    CoefficientSet,
    CoefficientError,
    ConfigError,
    SolverError,
    coefficients,
    coefficients_from_json,
    function_bounds,
    harmonic_mean,
    lambda_finite,
    lambda_infinity,
    lambda_zero,
    mean_value,
    rho,
    simulate_speed,
    speed,
    speed_infinity,
    speed_zero,
    theta,
    validate,
)

__all__ = [
    "APFunction",
    "CoefficientSet",
    "CoefficientError",
    "ConfigError",
    "SolverError",
    "coefficients",
    "coefficients_from_json",
    "function_bounds",
    "harmonic_mean",
    "lambda_finite",
    "lambda_infinity",
    "lambda_zero",
    "mean_value",
    "rho",
    "simulate_speed",
    "speed",
    "speed_infinity",
    "speed_zero",
    "theta",
    "validate",
]
