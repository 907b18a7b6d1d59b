"""Adaptive Pareto tail fitting and extreme quantile estimation."""

__version__ = "0.1.0"

from .adaptive import (
    AdaptiveConfig,
    TailSelection,
    build_grid,
    default_config,
    nearest_feasible_k0,
    select,
)
from .calibration import CalibrationResult, calibrate, load_calibration, save_calibration
from .changepoint import ConfigError, TestStatPair, WindowResult, t_pair, t_window
from .divergences import (
    QuadratureError,
    chi2_excess_vs_pareto,
    g_pareto,
    kl_excess_vs_pareto,
    kl_pareto,
    rho_star,
)
from .distributions import (
    ExcessLaw,
    GPD,
    Hall,
    Law,
    LogGamma,
    LogPerturbedPareto,
    Pareto,
    ParetoChangePoint,
    PositiveCauchy,
    alpha_F,
    decomposition_check,
    draw_sample,
    law_names,
    make_law,
    theta_fit,
    theta_fit_empirical,
)
from .estimators import (
    Sample,
    count_band,
    count_exceed,
    hill,
    hill_curve,
    loglik_ratio,
    theta_band,
    theta_local,
)
from .harness import (
    DEFAULT_P_GRID,
    ExperimentReport,
    Table,
    gamma_rmse_experiment,
    quantile_ratio_experiment,
    relmse,
    sample_quantile_comparison,
)
from .quantiles import quantile_adaptive, quantile_fixed_k, sample_quantile_index
from .reports import write_report

__all__ = [
    "__version__",
    "AdaptiveConfig",
    "CalibrationResult",
    "ConfigError",
    "DEFAULT_P_GRID",
    "ExcessLaw",
    "ExperimentReport",
    "Table",
    "GPD",
    "Hall",
    "Law",
    "LogGamma",
    "LogPerturbedPareto",
    "Pareto",
    "ParetoChangePoint",
    "PositiveCauchy",
    "QuadratureError",
    "Sample",
    "TailSelection",
    "TestStatPair",
    "WindowResult",
    "alpha_F",
    "build_grid",
    "calibrate",
    "chi2_excess_vs_pareto",
    "count_band",
    "count_exceed",
    "decomposition_check",
    "default_config",
    "draw_sample",
    "g_pareto",
    "gamma_rmse_experiment",
    "hill",
    "hill_curve",
    "kl_excess_vs_pareto",
    "kl_pareto",
    "law_names",
    "load_calibration",
    "loglik_ratio",
    "make_law",
    "nearest_feasible_k0",
    "quantile_adaptive",
    "quantile_fixed_k",
    "quantile_ratio_experiment",
    "relmse",
    "rho_star",
    "sample_quantile_comparison",
    "sample_quantile_index",
    "save_calibration",
    "select",
    "t_pair",
    "t_window",
    "theta_band",
    "theta_fit",
    "theta_fit_empirical",
    "theta_local",
    "write_report",
]
