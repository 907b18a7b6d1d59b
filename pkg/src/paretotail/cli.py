"""Command line interface.

Four subcommands cover the workflows: ``estimate`` fits the adaptive tail
model to a data file, ``calibrate`` simulates critical values from the
Pareto null, ``simulate`` runs the Monte Carlo study experiments, and
``analyze`` tabulates the analytic tail functionals of a chosen law.
Every run writes CSV/JSON artifacts plus rendered figures (suppressed by
``--no-figures``) into the output directory, along with a manifest
sufficient to reproduce it.

Option precedence is CLI flag, then ``--config`` JSON file, then built-in
defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._quad import QuadratureError
from .adaptive import (
    DEFAULT_DELTA,
    DEFAULT_GRID,
    DEFAULT_K0_FRAC,
    DEFAULT_RHO,
    DEFAULT_Z,
    AdaptiveConfig,
    nearest_feasible_k0,
    select,
)
from .calibration import calibrate, load_calibration, save_calibration
from .changepoint import ConfigError
from .divergences import chi2_excess_vs_pareto
from .distributions import law_names, make_law, theta_fit
from .estimators import Sample, hill_curve
from .figures import analyze_plot, calibration_ecdf_plot, hill_plot, render_report
from .harness import (
    DEFAULT_P_GRID,
    gamma_rmse_experiment,
    quantile_ratio_experiment,
    sample_quantile_comparison,
)
from .quantiles import quantile_adaptive
from .reports import format_number, write_report

DEFAULT_P_LEVELS = (0.99, 0.999, 0.9999)


class CliError(Exception):
    """Fatal diagnostic; printed without a traceback."""


def read_observations(path) -> np.ndarray:
    """Parse one-observation-per-line data; commas and whitespace both split.

    A non-numeric first line is treated as a header.  Non-positive values
    are rejected with the offending line number.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read input file {path}: {exc}") from exc
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = [t for t in line.replace(",", " ").split() if t]
        if not tokens:
            continue
        parsed = []
        for tok in tokens:
            try:
                parsed.append(float(tok))
            except ValueError:
                if lineno == 1 and not values:
                    parsed = None
                    break
                raise CliError(f"could not parse {tok!r} at line {lineno} of {path}")
        if parsed is None:
            continue
        for v in parsed:
            if not math.isfinite(v) or v <= 0.0:
                raise CliError(f"non-positive observation at line {lineno}")
            values.append(v)
    if not values:
        raise CliError(f"no observations found in {path}")
    return np.asarray(values, dtype=float)


def _load_config_file(path) -> dict:
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise CliError(f"config file {path} must hold a JSON object")
    return doc


def _opt(args, file_cfg: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in file_cfg:
        return file_cfg[key]
    return default


def _resolve_law(args, file_cfg):
    name = _opt(args, file_cfg, "law", None)
    if name is None:
        raise CliError("a law is required: pass --law (one of "
                       f"{', '.join(law_names())})")
    raw = _opt(args, file_cfg, "law_params", None)
    params = {}
    if raw:
        if isinstance(raw, str):
            try:
                params = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CliError(f"--law-params must be a JSON object: {exc}") from exc
        else:
            params = dict(raw)
    try:
        return make_law(name, **params)
    except (TypeError, ValueError) as exc:
        raise CliError(str(exc)) from exc


def _resolve_adaptive(args, file_cfg, n: int) -> AdaptiveConfig:
    rho = float(_opt(args, file_cfg, "rho", DEFAULT_RHO))
    delta = float(_opt(args, file_cfg, "delta", DEFAULT_DELTA))
    K_n = int(_opt(args, file_cfg, "grid", DEFAULT_GRID))
    K_n = min(K_n, n)
    z = getattr(args, "z", None)
    if z is None:
        z = file_cfg.get("z")
    mu = getattr(args, "mu", None)
    if mu is None:
        mu = file_cfg.get("mu")
    calib = _opt(args, file_cfg, "calibration_file", None)
    if calib is not None:
        if z is not None or mu is not None:
            raise CliError("--calibration-file conflicts with --z/--mu")
        z = load_calibration(calib).z
    if z is None and mu is None:
        z = DEFAULT_Z
    k0 = _opt(args, file_cfg, "k0", None)
    if k0 is None:
        frac = float(_opt(args, file_cfg, "k0_frac", DEFAULT_K0_FRAC))
        k0 = nearest_feasible_k0(n, K_n, rho, delta, frac)
    try:
        return AdaptiveConfig(
            rho=rho, delta=delta, k0=int(k0), K_n=K_n,
            z=float(z) if z is not None else None,
            mu=float(mu) if mu is not None else None,
        )
    except ConfigError as exc:
        raise CliError(str(exc)) from exc


def _resolve_workers(args, file_cfg) -> int:
    w = _opt(args, file_cfg, "workers", None)
    return int(w) if w is not None else (os.cpu_count() or 1)


def _outdir(args, file_cfg) -> Path:
    out = Path(_opt(args, file_cfg, "out", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(outdir: Path, name: str, payload: dict, artifacts) -> Path:
    payload = dict(payload)
    payload["version"] = __version__
    payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    payload["artifacts"] = [str(Path(a).name) for a in artifacts]
    path = outdir / f"{name}_manifest.json"
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def cmd_estimate(args) -> int:
    file_cfg = _load_config_file(args.config)
    data = read_observations(args.input)
    sample = Sample(data)
    config = _resolve_adaptive(args, file_cfg, sample.n)
    p_levels = [float(p) for p in (_opt(args, file_cfg, "p", None) or DEFAULT_P_LEVELS)]
    if any(not 0.0 < p < 1.0 for p in p_levels):
        raise CliError("quantile levels must lie in (0, 1)")
    try:
        selection = select(sample, config)
    except ConfigError as exc:
        raise CliError(str(exc)) from exc
    quantiles = {repr(p): float(quantile_adaptive(sample, selection, p)) for p in p_levels}
    outdir = _outdir(args, file_cfg)
    result = {
        "n": sample.n,
        "m_hat": selection.m_hat,
        "k_hat": selection.k_hat,
        "tau_hat": selection.tau_hat,
        "theta_hat": selection.theta_hat,
        "rejected": selection.rejected,
        "quantiles": quantiles,
        "trace": [[m, t] for m, t in selection.trace],
        "config": {
            "rho": config.rho, "delta": config.delta, "k0": config.k0,
            "K_n": config.K_n, "z": config.z, "mu": config.mu,
        },
    }
    result_path = outdir / "estimate_result.json"
    result_path.write_text(json.dumps(result, sort_keys=True, indent=2) + "\n",
                           encoding="utf-8")
    curve = hill_curve(sample)
    ks = np.arange(1, sample.n)
    curve_path = outdir / "hill_curve.csv"
    lines = ["k,hill"]
    lines += [f"{k},{format_number(v)}" for k, v in zip(ks, curve)]
    curve_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    artifacts = [result_path, curve_path]
    if not args.no_figures:
        artifacts.append(
            hill_plot(outdir / "hill_plot.png", ks, curve,
                      k_hat=selection.k_hat if selection.k_hat < sample.n else None,
                      theta_hat=selection.theta_hat if selection.k_hat < sample.n else None)
        )
    _write_manifest(outdir, "estimate",
                    {"command": "estimate", "input": str(args.input),
                     "config": result["config"], "p_levels": p_levels},
                    artifacts)
    print(f"n={sample.n} rejected={selection.rejected} k_hat={selection.k_hat} "
          f"tau_hat={selection.tau_hat:.6g} theta_hat={selection.theta_hat:.6g}")
    for p in p_levels:
        print(f"  q({p}) = {quantiles[repr(p)]:.6g}")
    return 0


def cmd_calibrate(args) -> int:
    file_cfg = _load_config_file(args.config)
    n = int(_opt(args, file_cfg, "n", 1000))
    n_rep = int(_opt(args, file_cfg, "reps", 2000))
    level = float(_opt(args, file_cfg, "level", 0.99))
    seed = int(_opt(args, file_cfg, "seed", 0))
    workers = _resolve_workers(args, file_cfg)
    config = _resolve_adaptive(args, file_cfg, n)
    if n_rep < 100:
        print("warning: low-precision calibration (fewer than 100 repetitions)",
              file=sys.stderr)
    try:
        result = calibrate(n, config, n_rep=n_rep, level=level, seed=seed,
                           workers=workers)
    except ConfigError as exc:
        raise CliError(str(exc)) from exc
    outdir = _outdir(args, file_cfg)
    out_path = outdir / f"calibration_{n}.json"
    save_calibration(result, out_path, include_ecdf=not args.no_ecdf)
    artifacts = [out_path]
    if not args.no_figures:
        fig_path = outdir / f"calibration_{n}.png"
        calibration_ecdf_plot(fig_path, result.ecdf, result.z, level)
        artifacts.append(fig_path)
    _write_manifest(outdir, f"calibration_{n}",
                    {"command": "calibrate", "n": n, "n_rep": n_rep,
                     "level": level, "seed": seed,
                     "config": {"rho": config.rho, "delta": config.delta,
                                "k0": config.k0, "K_n": config.K_n}},
                    artifacts)
    print(f"calibrated z = {result.z:.6g} at level {level:g} "
          f"(n={n}, {n_rep} repetitions)")
    return 0


_EXPERIMENTS = {"table1", "table2", "gamma_rmse"}


def cmd_simulate(args) -> int:
    file_cfg = _load_config_file(args.config)
    if args.experiment not in _EXPERIMENTS:
        raise CliError(f"unknown experiment {args.experiment!r}; "
                       f"choose from {', '.join(sorted(_EXPERIMENTS))}")
    law = _resolve_law(args, file_cfg)
    n = int(_opt(args, file_cfg, "n", 1000))
    n_rep = int(_opt(args, file_cfg, "reps", 2000))
    seed = int(_opt(args, file_cfg, "seed", 0))
    workers = _resolve_workers(args, file_cfg)
    config = _resolve_adaptive(args, file_cfg, n)
    outdir = _outdir(args, file_cfg)
    if args.experiment == "table1":
        p_grid = [float(p) for p in (_opt(args, file_cfg, "p", None) or DEFAULT_P_GRID)]
        report = quantile_ratio_experiment(
            law, n=n, n_rep=n_rep, p_grid=p_grid, config=config, seed=seed,
            workers=workers, k_stride=int(_opt(args, file_cfg, "k_stride", 1)),
        )
    elif args.experiment == "table2":
        k_max = int(_opt(args, file_cfg, "k_max", min(500, n - 1)))
        report = sample_quantile_comparison(
            law, n=n, n_rep=n_rep, k_grid=np.arange(1, k_max + 1),
            config=config, seed=seed, workers=workers,
        )
    else:
        gamma = _opt(args, file_cfg, "gamma", None)
        report = gamma_rmse_experiment(
            law, gamma=float(gamma) if gamma is not None else None,
            n=n, n_rep=n_rep, config=config, seed=seed, workers=workers,
        )
    artifacts = write_report(report, outdir)
    if not args.no_figures:
        artifacts += render_report(report, outdir)
    print(f"wrote {len(artifacts)} artifacts for {args.experiment} "
          f"({law.name}, n={n}, {n_rep} repetitions) to {outdir}")
    return 0


def cmd_analyze(args) -> int:
    file_cfg = _load_config_file(args.config)
    law = _resolve_law(args, file_cfg)
    t_min = _opt(args, file_cfg, "t_min", None)
    t_max = _opt(args, file_cfg, "t_max", None)
    points = int(_opt(args, file_cfg, "t_points", 25))
    t_lo = float(t_min) if t_min is not None else float(law.isf(0.5))
    t_hi = float(t_max) if t_max is not None else float(law.isf(1e-5))
    if not 0.0 < t_lo < t_hi:
        raise CliError(f"need 0 < t-min < t-max, got {t_lo}, {t_hi}")
    grid = np.geomspace(t_lo, t_hi, points)
    rows = []
    for t in grid:
        status = "ok"
        try:
            th = theta_fit(law, float(t))
        except (QuadratureError, ValueError) as exc:
            th, status = math.nan, f"error:{type(exc).__name__}"
        try:
            al = float(law.alpha(float(t)))
        except (ValueError, ZeroDivisionError):
            al = math.nan
            status = "error:alpha"
        if status == "ok":
            try:
                c2 = chi2_excess_vs_pareto(law, float(t), th)
            except (QuadratureError, ValueError) as exc:
                c2, status = math.nan, f"error:{type(exc).__name__}"
        else:
            c2 = math.nan
        rows.append((float(t), th, al, c2, status))
    outdir = _outdir(args, file_cfg)
    base = f"{law.name}_analyze"
    csv_path = outdir / f"{base}.csv"
    lines = ["t,theta_fit,alpha,chi2_excess,status"]
    for t, th, al, c2, status in rows:
        lines.append(
            f"{format_number(t)},{format_number(th)},{format_number(al)},"
            f"{format_number(c2)},{status}"
        )
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    artifacts = [csv_path]
    if not args.no_figures:
        fig_path = outdir / f"{base}.png"
        analyze_plot(
            fig_path,
            [r[0] for r in rows],
            [r[1] for r in rows],
            [r[2] for r in rows],
            [r[3] for r in rows],
            repr(law),
        )
        artifacts.append(fig_path)
    _write_manifest(outdir, base,
                    {"command": "analyze", "law": {"name": law.name,
                                                   "params": dict(law.params)},
                     "t_min": t_lo, "t_max": t_hi, "points": points},
                    artifacts)
    n_bad = sum(1 for r in rows if r[4] != "ok")
    print(f"wrote {csv_path} ({len(rows)} thresholds, {n_bad} marked rows)")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with defaults for any option")
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")


def _add_adaptive(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rho", type=float, help="lower window fraction in (0, 1/3]")
    p.add_argument("--delta", type=float, help="upper window fraction in (0, 1/3]")
    p.add_argument("--k0", type=int, help="starting grid index (overrides --k0-frac)")
    p.add_argument("--k0-frac", dest="k0_frac", type=float,
                   help="starting point as a fraction of n (default 0.05)")
    p.add_argument("--grid", type=int, help="grid length (default 200, capped at n)")
    p.add_argument("--z", type=float, help="critical value (default 10)")
    p.add_argument("--mu", type=float, help="critical-value policy z = mu * log(n)")
    p.add_argument("--calibration-file", dest="calibration_file",
                   help="JSON calibration result supplying the critical value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paretotail",
        description="Adaptive Pareto tail fitting and extreme quantile estimation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="fit the adaptive tail model to a data file")
    p_est.add_argument("--input", required=True, help="data file, one observation per line")
    p_est.add_argument("--p", type=float, nargs="+", help="quantile levels to estimate")
    _add_adaptive(p_est)
    _add_common(p_est)
    p_est.set_defaults(func=cmd_estimate)

    p_cal = sub.add_parser("calibrate", help="simulate critical values from the Pareto null")
    p_cal.add_argument("--n", type=int, help="sample size (default 1000)")
    p_cal.add_argument("--reps", type=int, help="Monte Carlo repetitions (default 2000)")
    p_cal.add_argument("--level", type=float, help="confidence level (default 0.99)")
    p_cal.add_argument("--seed", type=int, help="root seed (default 0)")
    p_cal.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    p_cal.add_argument("--no-ecdf", action="store_true",
                       help="omit the simulated maxima from the JSON output")
    _add_adaptive(p_cal)
    _add_common(p_cal)
    p_cal.set_defaults(func=cmd_calibrate)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo study experiment")
    p_sim.add_argument("experiment", help="one of table1, table2, gamma_rmse")
    p_sim.add_argument("--law", help=f"law name: {', '.join(law_names())}")
    p_sim.add_argument("--law-params", dest="law_params",
                       help='law parameters as JSON, e.g. \'{"theta": 2}\'')
    p_sim.add_argument("--n", type=int, help="sample size (default 1000)")
    p_sim.add_argument("--reps", type=int, help="Monte Carlo repetitions (default 2000)")
    p_sim.add_argument("--seed", type=int, help="root seed (default 0)")
    p_sim.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    p_sim.add_argument("--p", type=float, nargs="+", help="levels for table1")
    p_sim.add_argument("--k-stride", dest="k_stride", type=int,
                       help="stride of the fixed-k scan in table1 (default 1)")
    p_sim.add_argument("--k-max", dest="k_max", type=int,
                       help="largest k in table2 (default min(500, n-1))")
    p_sim.add_argument("--gamma", type=float,
                       help="target index for gamma_rmse (default: the law's)")
    _add_adaptive(p_sim)
    _add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_ana = sub.add_parser("analyze", help="tabulate tail functionals of an analytic law")
    p_ana.add_argument("--law", help=f"law name: {', '.join(law_names())}")
    p_ana.add_argument("--law-params", dest="law_params",
                       help="law parameters as JSON")
    p_ana.add_argument("--t-min", dest="t_min", type=float, help="smallest threshold")
    p_ana.add_argument("--t-max", dest="t_max", type=float, help="largest threshold")
    p_ana.add_argument("--t-points", dest="t_points", type=int,
                       help="number of grid points (default 25)")
    _add_common(p_ana)
    p_ana.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
