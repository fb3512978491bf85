"""Command-line front end: config parsing, orchestration, CSV/report output."""

import argparse
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .experiments import (
    CoarseKind,
    ErrorTable,
    ExperimentConfig,
    fit_order,
    monte_carlo_errors,
    predicted_order,
)
from .spectral import Nonlinearity

__all__ = ["RunConfig", "ConfigError", "parse_config", "run_experiment", "main"]

COLLAPSE_TOL = 1e-10
# Fitted-vs-predicted windows used for the report's pass/fail column.
IMPLICIT_WINDOW = 0.3
EXPO_WINDOW = 0.15
EXPO_IMPROVED_SLACK = 0.1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    alpha_bar: float = 0.25
    P: int = 100
    G: int = 201
    T: float = 1.0
    dt_exponent: int = 13
    J_list: tuple[int, ...] = (16, 32, 64, 128, 256, 512)
    K: int = 3
    coarse: str = "implicit"  # expo | implicit
    nonlinearity: str = "zero"  # zero | cos | "scaled_cos <amplitude>"
    M: int = 100
    seed: int = 42
    threads: int = 1
    out_dir: str = "out"

    def validate(self) -> None:
        if self.alpha_bar <= 0:
            raise ConfigError("alpha_bar must be > 0")
        if self.P < 1 or self.G < self.P:
            raise ConfigError(f"need G >= P >= 1, got P={self.P}, G={self.G}")
        if self.T <= 0 or self.dt_exponent < 0:
            raise ConfigError("need T > 0 and dt_exponent >= 0")
        if self.K < 0 or self.M < 1 or self.threads < 1:
            raise ConfigError("need K >= 0, M >= 1, threads >= 1")
        if self.coarse not in ("expo", "implicit"):
            raise ConfigError(f"coarse must be 'expo' or 'implicit', got {self.coarse!r}")
        self.coarse_kind()
        self.make_nonlinearity()
        n_fine = 2**self.dt_exponent
        for J in self.J_list:
            if J < 1 or n_fine % J != 0:
                raise ConfigError(f"J={J} does not divide 2^{self.dt_exponent}={n_fine}")

    def coarse_kind(self) -> CoarseKind:
        return (CoarseKind.EXPONENTIAL_EULER if self.coarse == "expo"
                else CoarseKind.LINEAR_IMPLICIT_EULER)

    def make_nonlinearity(self) -> Nonlinearity:
        parts = self.nonlinearity.split()
        if parts == ["zero"]:
            return Nonlinearity.zero()
        if parts == ["cos"]:
            return Nonlinearity.scaled_cos(1.0, self.G)
        if len(parts) == 2 and parts[0] == "scaled_cos":
            try:
                amplitude = float(parts[1])
            except ValueError:
                raise ConfigError(f"bad scaled_cos amplitude {parts[1]!r}") from None
            return Nonlinearity.scaled_cos(amplitude, self.G)
        raise ConfigError(f"unknown nonlinearity {self.nonlinearity!r}")


_PARSERS = {
    "alpha_bar": float,
    "P": int,
    "G": int,
    "T": float,
    "dt_exponent": int,
    "J_list": lambda s: tuple(int(x) for x in s.split(",") if x.strip()),
    "K": int,
    "coarse": str,
    "nonlinearity": str,
    "M": int,
    "seed": int,
    "threads": int,
    "out_dir": str,
}


def parse_config(text: str) -> RunConfig:
    """Parse flat key=value lines; '#' starts a comment, unknown keys reject."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except (ValueError, TypeError):
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    cfg = RunConfig(**values)
    try:
        cfg.validate()
    except ConfigError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _fit_all(cfg: RunConfig, table: ErrorTable) -> dict[int, float | None]:
    fits: dict[int, float | None] = {}
    for k in range(cfg.K + 1):
        try:
            fits[k] = fit_order(table, k)
        except ValueError:
            fits[k] = None
    return fits


def _predictions(cfg: RunConfig, k: int) -> tuple[float, float | None]:
    kind = cfg.coarse_kind()
    base = predicted_order(kind, cfg.alpha_bar, k)
    improved = None
    if kind is CoarseKind.EXPONENTIAL_EULER and k >= 2:
        improved = predicted_order(kind, cfg.alpha_bar, k, regime="improved")
    return base, improved


def _verdict(cfg: RunConfig, k: int, fit: float | None) -> str:
    if fit is None:
        return "n/a"
    base, improved = _predictions(cfg, k)
    if cfg.coarse_kind() is CoarseKind.LINEAR_IMPLICIT_EULER:
        ok = abs(fit - base) <= IMPLICIT_WINDOW
    elif improved is None:
        ok = abs(fit - base) <= EXPO_WINDOW
    else:
        ok = fit >= improved - EXPO_IMPROVED_SLACK  # lower bound, one-sided
    return "pass" if ok else "FAIL"


def run_experiment(cfg: RunConfig) -> int:
    """Run the configured study; write errors.csv, orders.csv, report.txt, figure."""
    cfg.validate()
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    exp = ExperimentConfig(cfg.alpha_bar, cfg.P, cfg.T, cfg.dt_exponent,
                           cfg.coarse_kind(), cfg.make_nonlinearity())
    table = monte_carlo_errors(exp, list(cfg.J_list), cfg.K, cfg.M, cfg.seed,
                               threads=cfg.threads)
    fits = _fit_all(cfg, table)

    lines = ["k,J,dT,rms_sup_error,rms_final_error,stderr_sup"]
    for r in sorted(table.rows, key=lambda r: (r.k, r.J)):
        lines.append(",".join([str(r.k), str(r.J), _fmt(r.dT), _fmt(r.rms_sup_error),
                               _fmt(r.rms_final_error), _fmt(r.stderr_sup)]))
    (out_dir / "errors.csv").write_text("\n".join(lines) + "\n")

    lines = ["k,fitted_order,predicted_order_base,predicted_order_improved_or_blank"]
    for k in range(cfg.K + 1):
        base, improved = _predictions(cfg, k)
        lines.append(",".join([
            str(k),
            _fmt(fits[k]) if fits[k] is not None else "",
            _fmt(base),
            _fmt(improved) if improved is not None else "",
        ]))
    (out_dir / "orders.csv").write_text("\n".join(lines) + "\n")

    (out_dir / "report.txt").write_text(_report_text(cfg, table, fits))

    from .figures import save_convergence_figure
    save_convergence_figure(table, fits, str(out_dir / "convergence.png"))
    return 0


def _report_text(cfg: RunConfig, table: ErrorTable, fits: dict[int, float | None]) -> str:
    out = []
    out.append("Parareal strong-convergence study")
    out.append(f"  coarse={cfg.coarse}  nonlinearity={cfg.nonlinearity}  "
               f"alpha_bar={cfg.alpha_bar}  P={cfg.P}  T={cfg.T}")
    out.append(f"  dt=2^-{cfg.dt_exponent}*T  J={list(cfg.J_list)}  K={cfg.K}  "
               f"M={cfg.M}  seed={cfg.seed}")
    out.append(f"  reference scale sup_n RMS |u_n^ref| = {table.reference_scale:.6e}")
    out.append("")
    out.append(f"{'k':>3} {'J':>6} {'dT':>12} {'rms_sup':>13} {'rms_final':>13} {'stderr':>10}")
    for r in sorted(table.rows, key=lambda r: (r.k, r.J)):
        out.append(f"{r.k:>3} {r.J:>6} {r.dT:>12.6g} {r.rms_sup_error:>13.6e} "
                   f"{r.rms_final_error:>13.6e} {r.stderr_sup:>10.3e}")
    out.append("")
    out.append(f"{'k':>3} {'fitted':>9} {'predicted':>10} {'improved':>9} {'verdict':>8}")
    for k in range(cfg.K + 1):
        base, improved = _predictions(cfg, k)
        fit = fits[k]
        fit_s = f"{fit:9.4f}" if fit is not None else f"{'-':>9}"
        imp_s = f"{improved:9.4f}" if improved is not None else f"{'-':>9}"
        out.append(f"{k:>3} {fit_s} {base:>10.4f} {imp_s} {_verdict(cfg, k, fit):>8}")
    out.append("")
    if (cfg.make_nonlinearity().is_zero
            and cfg.coarse_kind() is CoarseKind.EXPONENTIAL_EULER and cfg.K >= 1):
        worst = max((r.rms_sup_error for r in table.rows if r.k >= 1), default=0.0)
        ok = worst <= COLLAPSE_TOL * table.reference_scale
        out.append(f"collapse property (zero forcing, exponential coarse, k >= 1): "
                   f"{'satisfied' if ok else 'VIOLATED'} "
                   f"(max rms_sup for k>=1 = {worst:.3e}, "
                   f"tolerance {COLLAPSE_TOL:g} * reference scale)")
        out.append("")
    return "\n".join(out) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="spde-parareal",
                                     description="Parareal integrator for the 1D "
                                                 "stochastic heat equation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a convergence study from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--threads", type=int, default=None)

    p_pred = sub.add_parser("predict", help="print the theoretical order")
    p_pred.add_argument("--coarse", required=True, choices=["expo", "implicit"])
    p_pred.add_argument("--alpha-bar", required=True, type=float)
    p_pred.add_argument("--k", required=True, type=int)
    p_pred.add_argument("--regime", default="base", choices=["base", "improved"])

    args = parser.parse_args(argv)

    if args.command == "predict":
        kind = (CoarseKind.EXPONENTIAL_EULER if args.coarse == "expo"
                else CoarseKind.LINEAR_IMPLICIT_EULER)
        try:
            order = predicted_order(kind, args.alpha_bar, args.k, regime=args.regime)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(_fmt(order))
        return 0

    try:
        cfg = parse_config(Path(args.config).read_text())
        if args.out is not None:
            cfg = replace(cfg, out_dir=args.out)
        threads = args.threads
        if threads is None:
            env = os.environ.get("SPDE_PARAREAL_THREADS")
            threads = int(env) if env else None
        if threads is not None:
            cfg = replace(cfg, threads=threads)
        cfg.validate()
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        return run_experiment(cfg)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
