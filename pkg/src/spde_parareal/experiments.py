"""Monte Carlo strong-error estimation, order fitting, and the cost model.

The coarse step dT is varied by varying J at fixed fine step dt, so all
configurations of one study share the same fine lattice and the same
reference trajectory per sample.  Errors are reported as RMS-over-samples
of the L^2(0,1) norm, both as a sup over the coarse nodes and at the
final time.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grid import TimeGrid
from .integrators import CoarseKind
from .noise import NoiseSpec, sample_path
from .spectral import (
    Nonlinearity,
    apply_nonlinearity,
    resolvent_factors,
    semigroup_factors,
)

__all__ = [
    "ExperimentConfig",
    "ErrorRow",
    "ErrorTable",
    "CostModel",
    "monte_carlo_errors",
    "fit_order",
    "predicted_order",
    "cost_parareal",
    "cost_ref",
    "efficiency",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything defining one convergence study except (J, sample)."""

    alpha_bar: float
    n_modes: int
    T: float
    dt_exponent: int
    kind: CoarseKind
    nonlin: Nonlinearity

    @property
    def n_fine_total(self) -> int:
        return 2**self.dt_exponent

    @property
    def fine_grid(self) -> TimeGrid:
        return TimeGrid(self.T, self.n_fine_total, 1)


@dataclass(frozen=True)
class ErrorRow:
    k: int
    J: int
    dT: float
    rms_sup_error: float
    rms_final_error: float
    stderr_sup: float


@dataclass
class ErrorTable:
    rows: list[ErrorRow]
    n_samples: int
    reference_scale: float  # sup_n RMS |u_n^ref|, for relative diagnostics

    def row(self, k: int, J: int) -> ErrorRow:
        for r in self.rows:
            if r.k == k and r.J == J:
                return r
        raise KeyError(f"no row for k={k}, J={J}")

    def column(self, k: int) -> list[ErrorRow]:
        return sorted((r for r in self.rows if r.k == k), key=lambda r: r.dT)


# Samples are processed in fixed-size batches ("slabs" with a leading
# sample axis).  The batch size never depends on the thread count, and
# every stage of one batch (reference chain, coarse sweeps, fine sweeps)
# runs on slabs of identical shape, so the predictor-corrector
# cancellation is bitwise exact inside the engine and the output is
# byte-identical for any thread count.
_BATCH = 10


def _slab_step(u, h, inc_row, factor, nonlin: Nonlinearity):
    if nonlin.is_zero:
        return factor * (u + inc_row)
    return factor * (u + h * apply_nonlinearity(u, nonlin) + inc_row)


def _slab_coarse_increment(inc, n: int, J: int):
    acc = inc[:, n * J].copy()
    for j in range(1, J):
        acc += inc[:, n * J + j]
    return acc


def _slab_coarse_step(u, n, inc, kind, nonlin, grid):
    if kind is CoarseKind.EXPONENTIAL_EULER:
        factor = semigroup_factors(u.shape[-1], grid.dT)
    else:
        factor = resolvent_factors(u.shape[-1], grid.dT)
    return _slab_step(u, grid.dT, _slab_coarse_increment(inc, n, grid.J),
                      factor, nonlin)


def _slab_fine_propagate(u, n, inc, nonlin, grid):
    factor = semigroup_factors(u.shape[-1], grid.dt)
    v = u
    for ell in range(n * grid.J, (n + 1) * grid.J):
        v = _slab_step(v, grid.dt, inc[:, ell], factor, nonlin)
    return v


def _slab_reference_nodes(inc, nonlin, fine_grid: TimeGrid, stride: int):
    """Fine chain from zero initial data, recorded every `stride` steps."""
    n_batch, n_fine, n_modes = inc.shape
    factor = semigroup_factors(n_modes, fine_grid.dt)
    nodes = np.empty((n_batch, n_fine // stride + 1, n_modes))
    v = np.zeros((n_batch, n_modes))
    nodes[:, 0] = v
    for ell in range(n_fine):
        v = _slab_step(v, fine_grid.dt, inc[:, ell], factor, nonlin)
        if (ell + 1) % stride == 0:
            nodes[:, (ell + 1) // stride] = v
    return nodes


def _slab_parareal_sq_errors(inc, grid: TimeGrid, kind, nonlin, K: int,
                             ref_nodes):
    """Squared error norms |eps_n^(k)|^2, shape (n_batch, K+1, N+1)."""
    n_batch, _, n_modes = inc.shape
    N = grid.N
    traj = np.zeros((n_batch, N + 1, n_modes))
    u = traj[:, 0]
    for n in range(N):
        u = _slab_coarse_step(u, n, inc, kind, nonlin, grid)
        traj[:, n + 1] = u
    out = np.empty((n_batch, K + 1, N + 1))
    out[:, 0] = np.sum((traj - ref_nodes) ** 2, axis=-1)
    for k in range(K):
        fine = [_slab_fine_propagate(traj[:, n], n, inc, nonlin, grid)
                for n in range(N)]
        coarse_prev = [_slab_coarse_step(traj[:, n], n, inc, kind, nonlin, grid)
                       for n in range(N)]
        nxt = np.zeros_like(traj)
        u = traj[:, 0]
        nxt[:, 0] = u
        for n in range(N):
            u = (_slab_coarse_step(u, n, inc, kind, nonlin, grid)
                 - coarse_prev[n]) + fine[n]
            nxt[:, n + 1] = u
        traj = nxt
        out[:, k + 1] = np.sum((traj - ref_nodes) ** 2, axis=-1)
    return out


def _batch_errors(cfg: ExperimentConfig, J_list: list[int], K: int,
                  base_seed: int, first: int,
                  n_batch: int) -> tuple[list[np.ndarray], np.ndarray]:
    """Process samples first..first+n_batch-1 in one slab computation."""
    fine_grid = cfg.fine_grid
    inc = np.stack([
        sample_path(NoiseSpec(cfg.alpha_bar, cfg.n_modes, base_seed, m),
                    fine_grid).increments
        for m in range(first, first + n_batch)
    ])
    stride = math.gcd(*J_list)
    ref = _slab_reference_nodes(inc, cfg.nonlin, fine_grid, stride)
    ref_sup = np.max(np.sqrt(np.sum(ref**2, axis=-1)), axis=-1)
    per_J = []
    for J in J_list:
        grid = TimeGrid(cfg.T, cfg.n_fine_total // J, J)
        per_J.append(_slab_parareal_sq_errors(inc, grid, cfg.kind, cfg.nonlin,
                                              K, ref[:, :: J // stride]))
    return per_J, ref_sup


def monte_carlo_errors(cfg: ExperimentConfig, J_list: list[int], K: int,
                       n_samples: int, base_seed: int,
                       threads: int = 1) -> ErrorTable:
    """RMS errors over n_samples independent paths for each (k, J).

    Samples reuse identical Brownian paths across all (k, J) pairs.  The
    reduction order is fixed by the sample index, so the result does not
    depend on the thread count.
    """
    for J in J_list:
        if cfg.n_fine_total % J != 0:
            raise ValueError(
                f"J={J} does not divide 2^{cfg.dt_exponent}={cfg.n_fine_total}"
            )
    if n_samples < 1:
        raise ValueError(f"sample count must be >= 1, got {n_samples}")

    starts = list(range(0, n_samples, _BATCH))

    def worker(first: int) -> tuple[list[np.ndarray], np.ndarray]:
        return _batch_errors(cfg, J_list, K, base_seed, first,
                             min(_BATCH, n_samples - first))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(worker, starts))
    else:
        results = [worker(first) for first in starts]

    # (n_samples, K+1, N+1) per J, concatenated in sample order.
    sq = [np.concatenate([r[0][j] for r in results]) for j in range(len(J_list))]
    ref_sup = np.concatenate([r[1] for r in results])
    ref_scale = float(np.sqrt(np.mean(ref_sup**2)))

    rows = []
    for j, J in enumerate(J_list):
        dT = TimeGrid(cfg.T, cfg.n_fine_total // J, J).dT
        mean_sq = np.mean(sq[j], axis=0)  # (K+1, N+1)
        var_sq = np.maximum(np.mean(sq[j] ** 2, axis=0) - mean_sq**2, 0.0)
        for k in range(K + 1):
            n_star = int(np.argmax(mean_sq[k]))
            rms_sup = float(np.sqrt(mean_sq[k, n_star]))
            rms_final = float(np.sqrt(mean_sq[k, -1]))
            se_mean = float(np.sqrt(var_sq[k, n_star] / n_samples))
            stderr_sup = se_mean / (2.0 * rms_sup) if rms_sup > 0 else 0.0
            rows.append(ErrorRow(k, J, dT, rms_sup, rms_final, stderr_sup))
    return ErrorTable(rows, n_samples, ref_scale)


def fit_order(table: ErrorTable, k: int) -> float:
    """Least-squares slope of log(rms_sup_error) against log(dT)."""
    col = table.column(k)
    if len(col) < 3:
        raise ValueError(f"need >= 3 dT values to fit an order, got {len(col)}")
    if any(r.rms_sup_error <= 0 for r in col):
        raise ValueError(f"zero errors at k={k}; order is not defined")
    x = np.log([r.dT for r in col])
    y = np.log([r.rms_sup_error for r in col])
    return float(np.polyfit(x, y, 1)[0])


def predicted_order(kind: CoarseKind, alpha_bar: float, k: int,
                    regime: str = "base") -> float:
    """Theoretical convergence order of the error at iterate k.

    Implicit coarse: min(alpha_bar, k+1) -- saturates at the noise
    regularity.  Exponential coarse: (k+1)*min(alpha_bar, 1/2) in the base
    regime; the improved regime (k >= 2 only) gives the lower bound
    (k-1)*min(2*alpha_bar, 1/2) + 2*min(alpha_bar, 1/2).
    """
    if k < 0:
        raise ValueError(f"iteration index must be >= 0, got {k}")
    if alpha_bar <= 0:
        raise ValueError(f"alpha_bar must be > 0, got {alpha_bar}")
    if kind is CoarseKind.LINEAR_IMPLICIT_EULER:
        return min(alpha_bar, float(k + 1))
    a = min(alpha_bar, 0.5)
    if regime == "base":
        return (k + 1) * a
    if regime == "improved":
        if k < 2:
            raise ValueError(f"improved regime requires k >= 2, got k={k}")
        return (k - 1) * min(2.0 * alpha_bar, 0.5) + 2.0 * a
    raise ValueError(f"unknown regime {regime!r}")


@dataclass(frozen=True)
class CostModel:
    """Wall-clock model: per-evaluation times and processor count."""

    tau_coarse: float
    tau_fine_step: float
    n_proc: int
    K: int
    T: float
    dT: float
    dt: float

    def __post_init__(self) -> None:
        if min(self.tau_coarse, self.tau_fine_step, self.T, self.dT, self.dt) <= 0:
            raise ValueError("times and step sizes must be positive")
        if self.n_proc < 1 or self.K < 0:
            raise ValueError("need n_proc >= 1 and K >= 0")


def cost_parareal(m: CostModel) -> float:
    """(K+1)(T/dT) tau_G + K (T/dt) tau_F / n_proc."""
    return ((m.K + 1) * (m.T / m.dT) * m.tau_coarse
            + m.K * (m.T / m.dt) * m.tau_fine_step / m.n_proc)


def cost_ref(m: CostModel) -> float:
    """(T/dt) tau_F: the sequential fine solve."""
    return (m.T / m.dt) * m.tau_fine_step


def efficiency(m: CostModel) -> float:
    """cost_ref / cost_parareal = 1 / (K/n_proc + (K+1)(dt/dT)(tau_G/tau_F))."""
    return 1.0 / (m.K / m.n_proc
                  + (m.K + 1) * (m.dt / m.dT) * (m.tau_coarse / m.tau_fine_step))
