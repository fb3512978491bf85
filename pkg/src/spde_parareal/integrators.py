"""One-step integrators for du = Au dt + F(u) dt + dW^Q.

The coarse integrator takes one step of size dT, with the propagator
chosen as either the exact semigroup e^{dT A} (exponential Euler) or the
resolvent (I - dT A)^{-1} (linear implicit Euler).  The fine integrator
is J exponential Euler sub-steps of size dt = dT/J.  Both integrators
read increments from the same NoisePath, the coarse one through exact
partial sums, so they are driven by one Brownian path.

All steps funnel through the same kernel S*(u + h*F(u) + dW); with J = 1
the exponential coarse step and the fine step are therefore bitwise
identical, which the parareal exactness argument relies on.
"""

from enum import Enum

import numpy as np

from .grid import TimeGrid
from .noise import NoisePath, coarse_increment
from .spectral import (
    Nonlinearity,
    apply_nonlinearity,
    resolvent_factors,
    semigroup_factors,
)

__all__ = [
    "CoarseKind",
    "coarse_step",
    "fine_aux_step",
    "fine_propagate",
    "residual",
    "reference_trajectory",
]


class CoarseKind(Enum):
    EXPONENTIAL_EULER = "expo"
    LINEAR_IMPLICIT_EULER = "implicit"


def _step(u: np.ndarray, h: float, increment: np.ndarray, factor: np.ndarray,
          nonlin: Nonlinearity) -> np.ndarray:
    # Shared kernel: factor * (u + h F(u) + dW).  The single propagator
    # application is algebraically equal to applying it to each term.
    if nonlin.is_zero:
        return factor * (u + increment)
    return factor * (u + h * apply_nonlinearity(u, nonlin) + increment)


def _coarse_factor(n_modes: int, dT: float, kind: CoarseKind) -> np.ndarray:
    if kind is CoarseKind.EXPONENTIAL_EULER:
        return semigroup_factors(n_modes, dT)
    return resolvent_factors(n_modes, dT)


def coarse_step(u: np.ndarray, n: int, path: NoisePath, kind: CoarseKind,
                nonlin: Nonlinearity, grid: TimeGrid) -> np.ndarray:
    """One coarse step over interval [t_n, t_{n+1}]."""
    if not 0 <= n < grid.N:
        raise ValueError(f"interval index {n} out of range [0, {grid.N})")
    factor = _coarse_factor(u.shape[-1], grid.dT, kind)
    return _step(u, grid.dT, coarse_increment(path, n), factor, nonlin)


def fine_aux_step(v: np.ndarray, ell: int, path: NoisePath,
                  nonlin: Nonlinearity, grid: TimeGrid) -> np.ndarray:
    """One exponential Euler sub-step of size dt at global fine index ell."""
    if not 0 <= ell < grid.n_fine:
        raise ValueError(f"fine index {ell} out of range [0, {grid.n_fine})")
    factor = semigroup_factors(v.shape[-1], grid.dt)
    return _step(v, grid.dt, path.increments[ell], factor, nonlin)


def fine_propagate(u: np.ndarray, n: int, path: NoisePath,
                   nonlin: Nonlinearity, grid: TimeGrid) -> np.ndarray:
    """J fine sub-steps across coarse interval n (reads rows nJ..nJ+J-1 only)."""
    if not 0 <= n < grid.N:
        raise ValueError(f"interval index {n} out of range [0, {grid.N})")
    v = u
    for ell in range(n * grid.J, (n + 1) * grid.J):
        v = fine_aux_step(v, ell, path, nonlin, grid)
    return v


def residual(u: np.ndarray, n: int, path: NoisePath, kind: CoarseKind,
             nonlin: Nonlinearity, grid: TimeGrid) -> np.ndarray:
    """Fine-minus-coarse defect on interval n, driving the parareal correction."""
    return (fine_propagate(u, n, path, nonlin, grid)
            - coarse_step(u, n, path, kind, nonlin, grid))


def reference_trajectory(u0: np.ndarray, path: NoisePath,
                         nonlin: Nonlinearity, grid: TimeGrid) -> np.ndarray:
    """Sequential fine solution at the coarse nodes; shape (N+1, n_modes)."""
    out = np.empty((grid.N + 1, u0.shape[-1]))
    out[0] = u0
    u = u0
    for n in range(grid.N):
        u = fine_propagate(u, n, path, nonlin, grid)
        out[n + 1] = u
    return out
