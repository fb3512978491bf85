"""Truncated Q-Wiener increments on the fine time lattice.

Each Monte Carlo sample materializes the full lattice of per-mode,
per-fine-step Gaussian increments.  Entry (ell, p) is the increment of
mode p over fine step ell and has variance gamma_p * dt with
gamma_p = lambda_p^{1/2 - 2*alpha_bar}.

Generation is counter-based: a Philox stream keyed by (seed, sample_index)
is read position ell*P + p, and normals are produced by inverse-CDF of the
64-bit uniforms.  Regenerating any entry is bitwise reproducible and
independent of threading, and coarse increments are exact partial sums of
the fine lattice, so fine and coarse integrators see the same Brownian path.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .grid import TimeGrid
from .spectral import eigenvalues

__all__ = ["NoiseSpec", "NoisePath", "gamma", "gammas", "sample_path", "zero_path", "coarse_increment"]

_U64 = 2**64


def gamma(p: int, alpha_bar: float) -> float:
    """Covariance eigenvalue gamma_p = lambda_p^{1/2 - 2*alpha_bar}."""
    if p < 1:
        raise ValueError(f"mode index must be >= 1, got {p}")
    if alpha_bar <= 0:
        raise ValueError(f"alpha_bar must be > 0, got {alpha_bar}")
    return float(eigenvalues(p)[p - 1] ** (0.5 - 2.0 * alpha_bar))


def gammas(n_modes: int, alpha_bar: float) -> np.ndarray:
    """Vector of gamma_p for p = 1..n_modes."""
    if alpha_bar <= 0:
        raise ValueError(f"alpha_bar must be > 0, got {alpha_bar}")
    return eigenvalues(n_modes) ** (0.5 - 2.0 * alpha_bar)


@dataclass(frozen=True)
class NoiseSpec:
    """Identifies one noise realization: regularity, truncation and RNG keys."""

    alpha_bar: float
    n_modes: int
    seed: int
    sample_index: int = 0

    def __post_init__(self) -> None:
        if self.alpha_bar <= 0:
            raise ValueError(f"alpha_bar must be > 0, got {self.alpha_bar}")
        if self.n_modes < 1:
            raise ValueError(f"mode count must be >= 1, got {self.n_modes}")
        if self.sample_index < 0:
            raise ValueError(f"sample_index must be >= 0, got {self.sample_index}")


@dataclass(frozen=True)
class NoisePath:
    """Increment lattice of shape (N*J, n_modes) tied to a time grid."""

    increments: np.ndarray
    grid: TimeGrid

    def with_grid(self, grid: TimeGrid) -> "NoisePath":
        """Rebind the same fine lattice to a different (N, J) split.

        Valid only when the fine resolution is unchanged, i.e. refining or
        coarsening dT at fixed dt.
        """
        if grid.n_fine != self.grid.n_fine or grid.T != self.grid.T:
            raise ValueError("incompatible grid: fine lattice shape would change")
        return NoisePath(self.increments, grid)


def sample_path(spec: NoiseSpec, grid: TimeGrid) -> NoisePath:
    """Draw the full increment lattice for one Monte Carlo sample.

    Deterministic in (spec.seed, spec.sample_index); entry (ell, p) is read
    from stream position ell*n_modes + p of the Philox counter stream.
    """
    n = grid.n_fine * spec.n_modes
    key = np.array([spec.seed % _U64, spec.sample_index], dtype=np.uint64)
    raw = np.random.Philox(key=key).random_raw(n)
    # 53-bit uniform in the open interval (0, 1); one draw per normal.
    uniforms = (raw >> np.uint64(11)) * 2.0**-53 + 2.0**-54
    normals = ndtri(uniforms).reshape(grid.n_fine, spec.n_modes)
    scale = np.sqrt(gammas(spec.n_modes, spec.alpha_bar) * grid.dt)
    inc = scale * normals
    inc.setflags(write=False)
    return NoisePath(inc, grid)


def zero_path(n_modes: int, grid: TimeGrid) -> NoisePath:
    """All-zero lattice, handy for deterministic checks."""
    inc = np.zeros((grid.n_fine, n_modes))
    inc.setflags(write=False)
    return NoisePath(inc, grid)


def coarse_increment(path: NoisePath, n: int) -> np.ndarray:
    """Increment over coarse interval n: W(t_{n+1}) - W(t_n).

    Summed left-to-right over the J fine rows so the telescoping identity
    with the fine lattice holds bitwise.
    """
    if not 0 <= n < path.grid.N:
        raise ValueError(f"interval index {n} out of range [0, {path.grid.N})")
    J = path.grid.J
    rows = path.increments[n * J : (n + 1) * J]
    acc = rows[0].copy()
    for row in rows[1:]:
        acc += row
    return acc
