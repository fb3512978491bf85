"""Sine eigenbasis of the Dirichlet Laplacian on (0,1).

Fields are represented by their coefficients in the orthonormal basis
e_p(x) = sqrt(2) sin(p*pi*x), p = 1..P, stored as plain 1-D float arrays.
All operators of interest (heat semigroup, resolvent, fractional powers)
are diagonal in this basis, so their action is a componentwise multiply.
Nonlinearities are evaluated pseudo-spectrally on a uniform collocation
grid of interior points x_i = i/(G+1), i = 1..G.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "eigenvalue",
    "eigenvalues",
    "apply_semigroup",
    "apply_resolvent",
    "fractional_norm",
    "to_physical",
    "to_spectral",
    "Nonlinearity",
    "apply_nonlinearity",
]


def eigenvalue(p: int) -> float:
    """Eigenvalue (pi*p)^2 of -d^2/dx^2 with Dirichlet conditions."""
    if p < 1:
        raise ValueError(f"mode index must be >= 1, got {p}")
    return (np.pi * p) ** 2


@lru_cache(maxsize=None)
def eigenvalues(n_modes: int) -> np.ndarray:
    """Vector of the first n_modes eigenvalues (pi*p)^2, p = 1..n_modes."""
    if n_modes < 1:
        raise ValueError(f"mode count must be >= 1, got {n_modes}")
    lam = (np.pi * np.arange(1, n_modes + 1, dtype=float)) ** 2
    lam.setflags(write=False)
    return lam


@lru_cache(maxsize=None)
def semigroup_factors(n_modes: int, t: float) -> np.ndarray:
    """Per-mode decay factors exp(-lambda_p * t), cached for reuse."""
    fac = np.exp(-eigenvalues(n_modes) * t)
    fac.setflags(write=False)
    return fac


@lru_cache(maxsize=None)
def resolvent_factors(n_modes: int, dt: float) -> np.ndarray:
    """Per-mode factors 1/(1 + lambda_p * dt) of (I - dt*A)^{-1}."""
    fac = 1.0 / (1.0 + eigenvalues(n_modes) * dt)
    fac.setflags(write=False)
    return fac


def apply_semigroup(u: np.ndarray, t: float) -> np.ndarray:
    """Heat semigroup e^{tA}: c_p -> exp(-lambda_p t) c_p."""
    if t < 0:
        raise ValueError(f"semigroup time must be >= 0, got {t}")
    return u * semigroup_factors(u.shape[-1], t)


def apply_resolvent(u: np.ndarray, dt: float) -> np.ndarray:
    """Implicit-Euler resolvent (I - dt*A)^{-1}: c_p -> c_p/(1 + lambda_p dt)."""
    if dt <= 0:
        raise ValueError(f"resolvent step must be > 0, got {dt}")
    return u * resolvent_factors(u.shape[-1], dt)


def fractional_norm(u: np.ndarray, alpha: float) -> float:
    """Norm |u|_alpha = (sum_p lambda_p^{2 alpha} c_p^2)^{1/2}.

    alpha = 0 is the plain L^2(0,1) norm; negative alpha is the norm of
    the negative-order spaces (diagnostics only).
    """
    if not np.all(np.isfinite(u)):
        raise ValueError("field has non-finite entries")
    lam = eigenvalues(u.shape[-1])
    return float(np.sqrt(np.sum(lam ** (2.0 * alpha) * np.asarray(u) ** 2)))


@lru_cache(maxsize=None)
def _sine_table(n_modes: int, grid_points: int) -> np.ndarray:
    """Synthesis matrix S[i, p] = sqrt(2) sin(p*pi*x_i), x_i = (i+1)/(G+1)."""
    x = np.arange(1, grid_points + 1, dtype=float) / (grid_points + 1)
    p = np.arange(1, n_modes + 1, dtype=float)
    table = np.sqrt(2.0) * np.sin(np.pi * np.outer(x, p))
    table.setflags(write=False)
    return table


def to_physical(u: np.ndarray, grid_points: int) -> np.ndarray:
    """Evaluate the field at the interior grid points x_i = i/(G+1)."""
    n_modes = u.shape[-1]
    if grid_points < n_modes:
        raise ValueError(
            f"grid_points={grid_points} must be >= mode count {n_modes}"
        )
    return u @ _sine_table(n_modes, grid_points).T


def to_spectral(v: np.ndarray, n_modes: int) -> np.ndarray:
    """Discrete sine analysis of grid samples.

    Uses the DST-I quadrature c_p = (1/(G+1)) sum_i v_i e_p(x_i), which is
    the exact inverse of to_physical for fields band-limited to G modes.
    """
    grid_points = v.shape[-1]
    if grid_points < n_modes:
        raise ValueError(
            f"grid has {grid_points} points, cannot resolve {n_modes} modes"
        )
    return (v @ _sine_table(n_modes, grid_points)) / (grid_points + 1)


@dataclass(frozen=True)
class Nonlinearity:
    """Pointwise (Nemytskii) forcing u -> amplitude * cos(u).

    amplitude = 0 is the zero map and short-circuits the grid transforms.
    grid_points controls the collocation grid; None means 2P+1, which is
    alias-free for cos of a P-mode field.
    """

    amplitude: float = 0.0
    grid_points: int | None = None

    @classmethod
    def zero(cls) -> "Nonlinearity":
        return cls(0.0)

    @classmethod
    def scaled_cos(cls, amplitude: float, grid_points: int | None = None) -> "Nonlinearity":
        return cls(float(amplitude), grid_points)

    @property
    def is_zero(self) -> bool:
        return self.amplitude == 0.0


def apply_nonlinearity(u: np.ndarray, nonlin: Nonlinearity) -> np.ndarray:
    """Evaluate the forcing pseudo-spectrally: analyze(f(synthesize(u)))."""
    if nonlin.is_zero:
        return np.zeros_like(u)
    n_modes = u.shape[-1]
    grid_points = nonlin.grid_points or (2 * n_modes + 1)
    values = nonlin.amplitude * np.cos(to_physical(u, grid_points))
    return to_spectral(values, n_modes)
