"""Convergence figure rendered next to the CSV output."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import ErrorTable

__all__ = ["save_convergence_figure"]


def save_convergence_figure(table: ErrorTable, fits: dict[int, float | None],
                            out_path: str) -> None:
    """Log-log plot of rms_sup_error vs dT, one line per iterate k."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ks = sorted({r.k for r in table.rows})
    for k in ks:
        col = table.column(k)
        dT = np.array([r.dT for r in col])
        err = np.array([r.rms_sup_error for r in col])
        slope = fits.get(k)
        label = f"k={k}" if slope is None else f"k={k} (slope {slope:.2f})"
        ax.loglog(dT, np.maximum(err, 1e-300), "o-", label=label)
        if slope is not None and np.all(err > 0):
            c = np.exp(np.mean(np.log(err) - slope * np.log(dT)))
            ax.loglog(dT, c * dT**slope, "k--", linewidth=0.8)
    ax.set_xlabel(r"coarse step $\Delta T$")
    ax.set_ylabel("RMS sup error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
