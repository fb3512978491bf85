"""Parareal integration of the 1D semilinear stochastic heat equation."""

from .experiments import (
    CostModel,
    ErrorRow,
    ErrorTable,
    ExperimentConfig,
    cost_parareal,
    cost_ref,
    efficiency,
    fit_order,
    monte_carlo_errors,
    predicted_order,
)
from .grid import TimeGrid
from .integrators import (
    CoarseKind,
    coarse_step,
    fine_aux_step,
    fine_propagate,
    reference_trajectory,
    residual,
)
from .noise import NoisePath, NoiseSpec, coarse_increment, gamma, gammas, sample_path, zero_path
from .parareal import PararealConfig, PararealRun, initialize, iterate, run
from .spectral import (
    Nonlinearity,
    apply_nonlinearity,
    apply_resolvent,
    apply_semigroup,
    eigenvalue,
    eigenvalues,
    fractional_norm,
    to_physical,
    to_spectral,
)

__all__ = [
    "TimeGrid",
    "CoarseKind",
    "Nonlinearity",
    "NoiseSpec",
    "NoisePath",
    "PararealConfig",
    "PararealRun",
    "ExperimentConfig",
    "ErrorRow",
    "ErrorTable",
    "CostModel",
    "eigenvalue",
    "eigenvalues",
    "apply_semigroup",
    "apply_resolvent",
    "fractional_norm",
    "to_physical",
    "to_spectral",
    "apply_nonlinearity",
    "gamma",
    "gammas",
    "sample_path",
    "zero_path",
    "coarse_increment",
    "coarse_step",
    "fine_aux_step",
    "fine_propagate",
    "residual",
    "reference_trajectory",
    "initialize",
    "iterate",
    "run",
    "monte_carlo_errors",
    "fit_order",
    "predicted_order",
    "cost_parareal",
    "cost_ref",
    "efficiency",
]

__version__ = "0.1.0"
