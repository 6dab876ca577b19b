"""Bifurcation analysis and simulation of adaptive two-expert softmax routing."""

from .bifurcation import (
    Equilibrium,
    EquilibriumSet,
    critical_feedback,
    critical_temperature,
    cusp_asymptote,
    cusp_normal_form,
    find_equilibria,
    fold_curve,
    hysteresis_boundary,
    hysteresis_width,
)
from .model import ParameterError, RouterParams, RouterState, potential, vector_field
from .simulator import SimConfig, integrate_mean_field, make_rng, run_ensemble, run_trajectory

__version__ = "0.1.0"

__all__ = [
    "Equilibrium",
    "EquilibriumSet",
    "ParameterError",
    "RouterParams",
    "RouterState",
    "SimConfig",
    "critical_feedback",
    "critical_temperature",
    "cusp_asymptote",
    "cusp_normal_form",
    "find_equilibria",
    "fold_curve",
    "hysteresis_boundary",
    "hysteresis_width",
    "integrate_mean_field",
    "make_rng",
    "potential",
    "run_ensemble",
    "run_trajectory",
    "vector_field",
]
