"""Predictor-corrector parareal iteration over the coarse intervals.

One iteration advances u_{n+1} <- G(u_n^new) - G(u_n^old) + F(u_n^old):
the fine propagations F(u_n^old) depend only on the previous iterate and
may run concurrently across intervals; the coarse chain is sequential.
Every propagation is an independent single-state computation, so results
are bitwise independent of the worker count.

The corrector sums the coarse difference first.  When the old and new
states of interval n coincide bitwise the two coarse evaluations cancel
exactly, which makes the error vanish bitwise for n <= k and makes the
reference trajectory a bitwise fixed point.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .grid import TimeGrid
from .integrators import CoarseKind, coarse_step, fine_propagate, reference_trajectory
from .noise import NoisePath
from .spectral import Nonlinearity

__all__ = ["PararealConfig", "PararealRun", "initialize", "iterate", "run"]


@dataclass(frozen=True)
class PararealConfig:
    grid: TimeGrid
    kind: CoarseKind
    nonlin: Nonlinearity
    n_iterations: int
    u0: np.ndarray
    concurrency: int = 1

    def __post_init__(self) -> None:
        if self.n_iterations < 0:
            raise ValueError(f"iteration count must be >= 0, got {self.n_iterations}")
        if self.concurrency < 1:
            raise ValueError(f"concurrency must be >= 1, got {self.concurrency}")
        if not np.all(np.isfinite(self.u0)):
            raise ValueError("initial condition has non-finite entries")


@dataclass
class PararealRun:
    """All iterates, the fine reference, and their differences.

    trajectories[k, n] is the state of iterate k at coarse node n;
    errors[k, n] = trajectories[k, n] - reference[n].
    """

    trajectories: np.ndarray
    reference: np.ndarray
    errors: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.errors = self.trajectories - self.reference[np.newaxis]

    def error_norms(self) -> np.ndarray:
        """L^2(0,1) norms |eps_n^(k)|, shape (K+1, N+1)."""
        return np.sqrt(np.sum(self.errors**2, axis=-1))


def initialize(cfg: PararealConfig, path: NoisePath) -> np.ndarray:
    """Iterate 0: the sequential coarse sweep from u0."""
    grid = cfg.grid
    out = np.empty((grid.N + 1, cfg.u0.shape[-1]))
    out[0] = cfg.u0
    u = cfg.u0
    for n in range(grid.N):
        u = coarse_step(u, n, path, cfg.kind, cfg.nonlin, grid)
        out[n + 1] = u
    return out


def iterate(prev: np.ndarray, cfg: PararealConfig, path: NoisePath) -> np.ndarray:
    """One parareal sweep from iterate prev to the next iterate."""
    grid = cfg.grid
    if prev.shape[0] != grid.N + 1:
        raise ValueError(f"expected {grid.N + 1} states, got {prev.shape[0]}")

    def fine_at(n: int) -> np.ndarray:
        return fine_propagate(prev[n], n, path, cfg.nonlin, grid)

    if cfg.concurrency > 1 and grid.N > 1:
        with ThreadPoolExecutor(max_workers=cfg.concurrency) as pool:
            fine = list(pool.map(fine_at, range(grid.N)))
    else:
        fine = [fine_at(n) for n in range(grid.N)]
    coarse_prev = [coarse_step(prev[n], n, path, cfg.kind, cfg.nonlin, grid)
                   for n in range(grid.N)]

    out = np.empty_like(prev)
    out[0] = prev[0]
    u = prev[0]
    for n in range(grid.N):
        u = (coarse_step(u, n, path, cfg.kind, cfg.nonlin, grid)
             - coarse_prev[n]) + fine[n]
        out[n + 1] = u
    return out


def run(cfg: PararealConfig, path: NoisePath,
        reference: np.ndarray | None = None) -> PararealRun:
    """Initialization, K parareal sweeps, and the fine reference.

    A precomputed reference may be passed in when it is shared across
    several configurations driven by the same fine lattice.
    """
    grid = cfg.grid
    traj = np.empty((cfg.n_iterations + 1, grid.N + 1, cfg.u0.shape[-1]))
    traj[0] = initialize(cfg, path)
    for k in range(cfg.n_iterations):
        traj[k + 1] = iterate(traj[k], cfg, path)
    if reference is None:
        reference = reference_trajectory(cfg.u0, path, cfg.nonlin, grid)
    return PararealRun(trajectories=traj, reference=reference)
