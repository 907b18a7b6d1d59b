"""Figure rendering for the CLI report paths.

Every figure is written next to its CSV so a report directory is
self-contained.  Rendering is headless (Agg backend) and deterministic in
content, though PNG bytes may differ across matplotlib versions; regression
checks therefore pin the CSV numbers, not the images.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import ExperimentReport
from .reports import report_basename

__all__ = [
    "hill_plot",
    "calibration_ecdf_plot",
    "analyze_plot",
    "render_report",
]

_DPI = 150


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def hill_plot(path, ks, hill_values, k_hat=None, theta_hat=None):
    """Hill trajectory against the number of upper order statistics."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(ks, hill_values, lw=0.9, color="tab:blue", label="Hill estimate")
    if k_hat is not None and theta_hat is not None:
        ax.axvline(k_hat, color="tab:red", ls="--", lw=1, label=f"selected k = {k_hat}")
        ax.axhline(theta_hat, color="tab:red", ls=":", lw=1,
                   label=f"tail index = {theta_hat:.4g}")
    ax.set_xlabel("k (upper order statistics)")
    ax.set_ylabel("tail index estimate")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def calibration_ecdf_plot(path, ecdf, z, level):
    """Empirical distribution of the simulated null maxima with the cutoff."""
    ecdf = np.asarray(ecdf)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.step(ecdf, np.arange(1, ecdf.size + 1) / ecdf.size, where="post", lw=1)
    ax.axvline(z, color="tab:red", ls="--", lw=1, label=f"z = {z:.3g} at level {level:g}")
    ax.axhline(level, color="tab:red", ls=":", lw=0.8)
    ax.set_xlabel("simulated max statistic")
    ax.set_ylabel("empirical distribution")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def analyze_plot(path, t, theta_t, alpha_t, chi2_t, law_label):
    """Fitted index, tail function and excess chi-squared over the threshold grid."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4.2))
    axes[0].plot(t, theta_t, lw=1.2, label="fitted tail index")
    axes[0].plot(t, alpha_t, lw=1.0, ls="--", label="alpha(t)")
    axes[0].set_xscale("log")
    axes[0].set_xlabel("threshold t")
    axes[0].set_ylabel("index")
    axes[0].set_title(law_label)
    axes[0].legend(frameon=False)
    axes[0].grid(alpha=0.3)
    finite = np.isfinite(chi2_t)
    axes[1].plot(np.asarray(t)[finite], np.asarray(chi2_t)[finite], lw=1.2, color="tab:green")
    axes[1].set_xscale("log")
    axes[1].set_yscale("log")
    axes[1].set_xlabel("threshold t")
    axes[1].set_ylabel("excess chi-squared at fitted index")
    axes[1].grid(alpha=0.3)
    return _finish(fig, path)


def _table1_figure(report, path):
    tbl = report.tables["ratio"]
    p = tbl.column("p")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    x = -np.log10(1.0 - p)
    ax.plot(x, tbl.column("ratio"), "o-", lw=1.2)
    ax.axhline(1.0, color="grey", lw=0.8)
    ax.set_xlabel("-log10(1 - p)")
    ax.set_ylabel("RelMSE ratio: adaptive / best fixed k")
    ax.set_title(f"{report.law_name}, n = {report.n}, {report.n_rep} repetitions")
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def _table2_figure(report, path):
    tbl = report.tables["ratio0"]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(tbl.column("k"), tbl.column("ratio0"), lw=1.2)
    ax.axhline(1.0, color="grey", lw=0.8)
    ax.set_xlabel("k")
    ax.set_ylabel("RelMSE ratio: sample quantile / adaptive")
    ax.set_title(f"{report.law_name}, n = {report.n}, {report.n_rep} repetitions")
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def _gamma_figure(report, path):
    curve = report.tables["rmse_hill"]
    summary = report.tables["summary"]
    sigma_ad = summary.cell("value", "sigma_adaptive")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(curve.column("k"), curve.column("sigma_hill"), lw=0.9, label="Hill RMSE")
    ax.axhline(sigma_ad, color="tab:red", ls="--", lw=1,
               label=f"adaptive RMSE = {sigma_ad:.4g}")
    ax.set_xlabel("k")
    ax.set_ylabel("RMSE against the regular-variation index")
    ax.set_ylim(0, min(2.0, float(np.nanmax(curve.column("sigma_hill"))) * 1.05))
    ax.set_title(f"{report.law_name}, n = {report.n}, {report.n_rep} repetitions")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    return _finish(fig, path)


_REPORT_FIGURES = {
    "table1": _table1_figure,
    "table2": _table2_figure,
    "gamma_rmse": _gamma_figure,
}


def render_report(report: ExperimentReport, outdir) -> list:
    """Render the figure associated with an experiment report; return paths."""
    renderer = _REPORT_FIGURES.get(report.experiment)
    if renderer is None:
        return []
    from pathlib import Path

    path = Path(outdir) / f"{report_basename(report)}.png"
    renderer(report, path)
    return [path]
