"""Experiment command line: deterministic CSV outputs plus a manifest per run.

Subcommands: evolve, correlate, husimi, rate-scan, pt-compare, classical-scan.
Exit codes: 0 success, 2 config error, 3 numerical-invariant violation.
A failed run leaves only the manifest, carrying the failure record; CSVs are
buffered in memory and written only after the whole computation succeeded.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .classical import chaotic_sea_points, regime_scan, to_angles
from .config import ExperimentConfig, config_lines, load_config
from .correlation import (
    WindowPolicy,
    entropy_scale,
    fit_linear_region,
    pt_entropy_series,
)
from .entanglement import husimi, reduce_first
from .errors import (
    ConfigError,
    DecayNotResolvableError,
    FitRegionError,
    NumericalInvariantError,
)
from .experiments import (
    initial_product_state,
    run_correlation_table,
    run_entropy_series,
    run_rate_point,
)
from .floquet import build_coupled, evolve

__all__ = ["main"]


def _f(x: float) -> str:
    """Fixed 17-significant-digit scientific formatting for stable baselines."""
    return f"{x:.16e}"


def _csv(header: str, rows: list[str]) -> str:
    return "\n".join([header, *rows]) + "\n"


def _map_ordered(fn, items: list, workers: int) -> list:
    """Run pure per-item computations, merged in input order; a worker pool
    never changes the numbers versus serial execution."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# sweep items (module level so worker processes can unpickle them)


def _evolve_item(args) -> tuple[float, list[tuple[int, float, float]]]:
    j, k1, k2, eps, angles, steps = args
    series = run_entropy_series(j, k1, k2, eps, angles, steps, method="svd")
    rows = [
        (int(t), float(series.s_vn[i]), float(series.s_lin[i]))
        for i, t in enumerate(series.t)
    ]
    return eps, rows


def _rate_item(args) -> tuple:
    j, k, eps, theta, phi, steps, policy_args, lyap_steps = args
    fit, lam = run_rate_point(
        j,
        k,
        eps,
        theta,
        phi,
        steps,
        policy=WindowPolicy(*policy_args),
        lyapunov_steps=lyap_steps,
    )
    return k, theta, phi, fit, lam


def _pt_compare_item(args) -> tuple[float, np.ndarray, np.ndarray]:
    j, k1, k2, eps, angles, steps, table = args
    exact = run_entropy_series(j, k1, k2, eps, angles, steps, method="svd")
    pt = pt_entropy_series(table, eps, j, steps)
    return eps, exact.s_lin, pt.series


# ---------------------------------------------------------------------------
# commands: each returns (files, manifest extras)

Files = dict[str, str]
Extras = dict[str, str]


def cmd_evolve(cfg: ExperimentConfig) -> tuple[Files, Extras]:
    items = [
        (cfg.j, cfg.k1, cfg.k2, eps, cfg.angles, cfg.steps) for eps in cfg.epsilon
    ]
    results = _map_ordered(_evolve_item, items, cfg.workers)
    files: Files = {}
    for eps, rows in results:
        s0 = entropy_scale(eps, cfg.j)
        lines = [
            f"{t},{_f(s_vn)},{_f(s_lin)},{_f(s_lin / s0 if s0 > 0 else 0.0)}"
            for t, s_vn, s_lin in rows
        ]
        files[f"entropy_eps{eps:g}.csv"] = _csv("t,s_vn,s_lin,s_lin_scaled", lines)
    return files, {}


def cmd_correlate(cfg: ExperimentConfig) -> tuple[Files, Extras]:
    table = run_correlation_table(cfg.j, cfg.k1, cfg.k2, cfg.angles, cfg.window)
    lines = []
    for t_ref in cfg.t_refs:
        for tau in range(0, min(cfg.tau_max, cfg.window - t_ref) + 1):
            d = table.d[t_ref + tau, t_ref]
            lines.append(f"{t_ref},{tau},{_f(abs(d))},{_f(d.real)},{_f(d.imag)}")
    files = {"correlation.csv": _csv("t_ref,tau,abs_d,re_d,im_d", lines)}
    return files, {}


def cmd_husimi(cfg: ExperimentConfig) -> tuple[Files, Extras]:
    if cfg.husimi_t > cfg.steps:
        raise ConfigError(f"husimi_t={cfg.husimi_t} exceeds steps={cfg.steps}")
    eps = cfg.epsilon[0]
    f = build_coupled(cfg.j, cfg.k1, cfg.k2, eps)
    state = evolve(initial_product_state(cfg.j, cfg.angles), f, cfg.husimi_t)
    grid = husimi(reduce_first(state), cfg.husimi_theta, cfg.husimi_phi)
    lines = [
        f"{_f(grid.theta[i])},{_f(grid.phi[k])},{_f(grid.q[i, k])}"
        for i in range(len(grid.theta))
        for k in range(len(grid.phi))
    ]
    files = {f"husimi_t{cfg.husimi_t}.csv": _csv("theta,phi,q", lines)}
    extras = {"husimi.normalization": _f(grid.normalization())}
    return files, extras


def cmd_rate_scan(cfg: ExperimentConfig) -> tuple[Files, Extras]:
    eps = cfg.epsilon[0]
    if eps <= 0:
        raise ConfigError("rate-scan needs epsilon > 0")
    k_select = cfg.init_select_k if cfg.init_select_k is not None else min(cfg.k_grid)
    try:
        points = chaotic_sea_points(
            k_select, cfg.n_init, seed=cfg.seed, steps=cfg.lyapunov_steps
        )
    except RuntimeError as exc:
        raise ConfigError(str(exc)) from exc
    inits = [to_angles(p) for p in points]
    policy_args = (cfg.t_start, cfg.t_end, 5, cfg.saturation_fraction, 5)
    items = [
        (cfg.j, k, eps, theta, phi, cfg.steps, policy_args, cfg.lyapunov_steps)
        for k in cfg.k_grid
        for (theta, phi) in inits
    ]
    results = _map_ordered(_rate_item, items, cfg.workers)
    lines = []
    for idx, (k, theta, phi, fit, lam) in enumerate(results):
        init_id = idx % len(inits)
        lines.append(
            f"{k:g},{init_id},{_f(theta)},{_f(phi)},{_f(fit.gamma_raw)},"
            f"{_f(fit.gamma_scaled)},{_f(fit.quality)},{_f(lam)}"
        )
    header = "k,init_id,theta,phi,gamma_raw,gamma_scaled,quality,lambda_classical"
    return {"rates.csv": _csv(header, lines)}, {
        "rate_scan.init_select_k": f"{k_select:g}"
    }


def cmd_pt_compare(cfg: ExperimentConfig) -> tuple[Files, Extras]:
    table = run_correlation_table(cfg.j, cfg.k1, cfg.k2, cfg.angles, cfg.steps)
    items = [
        (cfg.j, cfg.k1, cfg.k2, eps, cfg.angles, cfg.steps, table)
        for eps in cfg.epsilon
    ]
    results = _map_ordered(_pt_compare_item, items, cfg.workers)
    files: Files = {}
    for eps, exact, pt in results:
        s0 = entropy_scale(eps, cfg.j)
        lines = []
        for t in range(cfg.steps + 1):
            e = exact[t] / s0 if s0 > 0 else 0.0
            p = pt[t] / s0 if s0 > 0 else 0.0
            # denominator floored at 1e-15 so rows where both scaled values
            # are numerically zero report ~0 instead of roundoff ratios
            rel = 0.0 if e == p else abs(e - p) / max(abs(p), 1e-15)
            lines.append(f"{t},{_f(e)},{_f(p)},{_f(rel)}")
        files[f"pt_compare_eps{eps:g}.csv"] = _csv(
            "t,s_lin_exact_scaled,s_lin_pt_scaled,rel_dev", lines
        )
    return files, {}


def cmd_classical_scan(cfg: ExperimentConfig) -> tuple[Files, Extras]:
    stats = regime_scan(cfg.k_grid, cfg.samples, steps=cfg.lyapunov_steps, seed=cfg.seed)
    lines = [
        f"{s.k:g},{_f(s.lambda_mean)},{_f(s.lambda_max)},{s.samples}" for s in stats
    ]
    return {"classical_scan.csv": _csv("k,lambda_mean,lambda_max,samples", lines)}, {}


COMMANDS = {
    "evolve": cmd_evolve,
    "correlate": cmd_correlate,
    "husimi": cmd_husimi,
    "rate-scan": cmd_rate_scan,
    "pt-compare": cmd_pt_compare,
    "classical-scan": cmd_classical_scan,
}


# ---------------------------------------------------------------------------
# manifest + driver


def _write_manifest(
    outdir: Path,
    command: str,
    cfg: ExperimentConfig | None,
    elapsed: float,
    files: Files,
    extras: Extras,
    error: str | None,
) -> None:
    lines = [
        f"status = {'failed' if error else 'ok'}",
        f"command = {command}",
        f"version = {__version__}",
        f"elapsed_seconds = {elapsed:.3f}",
    ]
    if error:
        lines.append(f"error = {error}")
    if cfg is not None:
        lines.extend(config_lines(cfg))
    for key, value in extras.items():
        lines.append(f"{key} = {value}")
    for name, text in sorted(files.items()):
        digest = hashlib.sha256(text.encode()).hexdigest()
        lines.append(f"output.{name}.sha256 = {digest}")
    path = outdir / f"manifest_{command.replace('-', '_')}.txt"
    path.write_text("\n".join(lines) + "\n")


def _run(command: str, cfg: ExperimentConfig, outdir: Path) -> int:
    t0 = time.perf_counter()
    try:
        files, extras = COMMANDS[command](cfg)
    except ConfigError:
        raise
    except (NumericalInvariantError, FitRegionError, DecayNotResolvableError) as exc:
        _write_manifest(
            outdir, command, cfg, time.perf_counter() - t0, {}, {}, str(exc)
        )
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for name, text in files.items():
        (outdir / name).write_text(text)
    _write_manifest(
        outdir, command, cfg, time.perf_counter() - t0, files, extras, None
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ktops",
        description="Coupled kicked-top experiments with deterministic CSV outputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument(
            "--workers", type=int, default=None, help="worker pool size for sweeps"
        )
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one config key (repeatable)",
        )
    args = parser.parse_args(argv)
    try:
        overrides = list(args.overrides)
        if args.workers is not None:
            overrides.append(f"workers={args.workers}")
        cfg = load_config(args.config, overrides)
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        return _run(args.command, cfg, outdir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
