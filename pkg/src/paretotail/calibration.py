"""Monte Carlo calibration of the critical value from the Pareto null.

For Pareto observations the change-point statistics do not depend on the
Pareto index, so the null distribution of T_n = max over the tested grid of
the windowed statistics can be simulated once from the standard Pareto law
and reused for any data.  The critical value at a confidence level is the
corresponding order statistic of the simulated maxima.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._parallel import run_chunked
from .adaptive import AdaptiveConfig, tested_grid, validate_feasibility
from .changepoint import scan_windows
from .distributions import Pareto
from .estimators import Sample

__all__ = ["CalibrationResult", "t_n_max", "calibrate", "save_calibration", "load_calibration"]


@dataclass
class CalibrationResult:
    """Calibrated critical value and the simulated null maxima behind it."""

    z: float
    level: float
    n: int
    n_rep: int
    rho: float
    delta: float
    k0: int
    K_n: int
    seed: int
    ecdf: np.ndarray | None = None


def t_n_max(sample: Sample, config: AdaptiveConfig) -> float:
    """Maximum of the windowed statistic over the whole tested grid."""
    grid = tested_grid(sample.n, config)
    return float(np.max(scan_windows(sample, grid, config.rho, config.delta).t_max))


def _null_chunk(start: int, stop: int, n: int, n_rep: int, config: AdaptiveConfig, seed: int):
    children = np.random.SeedSequence(seed).spawn(n_rep)
    law = Pareto(1.0)
    grid = tested_grid(n, config)
    out = np.empty(stop - start)
    for j, child in enumerate(children[start:stop]):
        rng = np.random.default_rng(child)
        sample = Sample(law.sample(n, rng))
        scan = scan_windows(sample, grid, config.rho, config.delta)
        out[j] = np.max(scan.t_max)
    return out


def calibrate(
    n: int,
    config: AdaptiveConfig,
    n_rep: int = 2000,
    level: float = 0.99,
    seed: int = 0,
    workers: int = 1,
    keep_ecdf: bool = True,
) -> CalibrationResult:
    """Simulate the null maxima and return the level-quantile as the critical value.

    The empirical quantile is the order statistic at index ceil(level *
    n_rep), the right-continuous inverse, which is conservative on the
    rejection side.  Deterministic given the seed, for any worker count.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    if n_rep < 1:
        raise ValueError(f"n_rep must be positive, got {n_rep}")
    validate_feasibility(n, config)
    parts = run_chunked(_null_chunk, n_rep, workers=workers, args=(n, n_rep, config, seed))
    ecdf = np.sort(np.concatenate(parts))
    z = float(ecdf[math.ceil(level * n_rep) - 1])
    return CalibrationResult(
        z=z,
        level=level,
        n=n,
        n_rep=n_rep,
        rho=config.rho,
        delta=config.delta,
        k0=config.k0,
        K_n=config.K_n,
        seed=seed,
        ecdf=ecdf if keep_ecdf else None,
    )


def save_calibration(result: CalibrationResult, path, include_ecdf: bool = True) -> None:
    doc = {
        "z": result.z,
        "level": result.level,
        "n": result.n,
        "n_rep": result.n_rep,
        "rho": result.rho,
        "delta": result.delta,
        "k0": result.k0,
        "K_n": result.K_n,
        "seed": result.seed,
        "ecdf": None,
    }
    if include_ecdf and result.ecdf is not None:
        doc["ecdf"] = [float(v) for v in result.ecdf]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_calibration(path) -> CalibrationResult:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    ecdf = np.asarray(doc["ecdf"], dtype=float) if doc.get("ecdf") else None
    return CalibrationResult(
        z=float(doc["z"]),
        level=float(doc["level"]),
        n=int(doc["n"]),
        n_rep=int(doc["n_rep"]),
        rho=float(doc["rho"]),
        delta=float(doc["delta"]),
        k0=int(doc["k0"]),
        K_n=int(doc["K_n"]),
        seed=int(doc["seed"]),
        ecdf=ecdf,
    )
