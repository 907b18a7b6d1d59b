"""Stagewise adaptive choice of the tail threshold.

The candidate thresholds are the order statistics X_(r_i) on the grid
r_i = floor(i*n/K_n), i = 1..K_n.  Starting from index k0 the procedure
tests each candidate with the windowed change-point statistic; the first
index whose statistic exceeds the critical value fixes m_hat, and the
selected k_hat is the argmax of the tail component inside that window.  If
no candidate rejects, k_hat = n and the tail estimate falls back to the
Hill estimate over the full sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .changepoint import ConfigError, scan_windows
from .estimators import Sample, hill

__all__ = [
    "AdaptiveConfig",
    "TailSelection",
    "build_grid",
    "default_config",
    "full_grid",
    "nearest_feasible_k0",
    "select",
    "tested_grid",
    "validate_feasibility",
]

DEFAULT_RHO = 0.25
DEFAULT_DELTA = 0.05
DEFAULT_GRID = 200
DEFAULT_Z = 10.0
DEFAULT_K0_FRAC = 0.05


@dataclass(frozen=True)
class AdaptiveConfig:
    """Parameters of the adaptive procedure.

    Exactly one of ``z`` (a fixed critical value) or ``mu`` (the policy
    z_n = mu * log n) must be set.  The window constants must satisfy
    0 < rho, delta <= 1/3.
    """

    rho: float = DEFAULT_RHO
    delta: float = DEFAULT_DELTA
    k0: int = 20
    K_n: int = DEFAULT_GRID
    z: float | None = DEFAULT_Z
    mu: float | None = None

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0 / 3.0:
            raise ConfigError(f"rho must lie in (0, 1/3], got {self.rho}")
        if not 0.0 < self.delta <= 1.0 / 3.0:
            raise ConfigError(f"delta must lie in (0, 1/3], got {self.delta}")
        if self.k0 < 1:
            raise ConfigError(f"k0 must be a positive grid index, got {self.k0}")
        if self.K_n < 1:
            raise ConfigError(f"grid length K_n must be positive, got {self.K_n}")
        if (self.z is None) == (self.mu is None):
            raise ConfigError("exactly one of z and mu must be set")
        if self.z is not None and self.z <= 0.0:
            raise ConfigError(f"critical value z must be positive, got {self.z}")
        if self.mu is not None and self.mu <= 0.0:
            raise ConfigError(f"mu must be positive, got {self.mu}")

    def critical_value(self, n: int) -> float:
        if self.z is not None:
            return self.z
        return self.mu * math.log(n)

    def with_z(self, z: float) -> "AdaptiveConfig":
        return replace(self, z=z, mu=None)


@dataclass
class TailSelection:
    """Output of the adaptive procedure on one sample."""

    n: int
    m_hat: int
    k_hat: int
    tau_hat: float
    theta_hat: float
    rejected: bool
    trace: list = field(default_factory=list)


def full_grid(n: int, K_n: int) -> np.ndarray:
    """The grid r_i = floor(i*n/K_n) for i = 1..K_n, duplicates included."""
    if not 1 <= K_n <= n:
        raise ConfigError(f"grid length must satisfy 1 <= K_n <= n, got K_n={K_n}, n={n}")
    i = np.arange(1, K_n + 1, dtype=np.int64)
    return (i * n) // K_n


def build_grid(n: int, K_n: int) -> np.ndarray:
    """Candidate-index grid with duplicate values collapsed.

    Duplicates arise when K_n does not divide n evenly at small n; each
    distinct candidate is visited once.
    """
    r = full_grid(n, K_n)
    keep = np.concatenate(([True], r[1:] != r[:-1]))
    return r[keep]


def validate_feasibility(n: int, config: AdaptiveConfig) -> np.ndarray:
    """Check the grid conditions for the given sample size; return the full grid.

    The conditions are (1-delta)*r_i <= r_{i-1} for i = k0..K_n and
    rho * r_{k0} >= r_1.  They are validated rather than silently adjusted:
    loosening them would change the hypothesis each window tests.
    """
    r = full_grid(n, config.K_n)
    if config.k0 > config.K_n:
        raise ConfigError(f"k0={config.k0} exceeds the grid length K_n={config.K_n}")
    lo = max(config.k0, 2)
    bad = np.nonzero((1.0 - config.delta) * r[lo - 1:] > r[lo - 2:-1])[0]
    if bad.size:
        i = int(bad[0]) + lo
        raise ConfigError(
            f"window condition (1-delta)*r_i <= r_(i-1) fails at grid index i={i}: "
            f"(1-{config.delta})*{r[i - 1]} > {r[i - 2]} (n={n}, K_n={config.K_n})"
        )
    if config.rho * r[config.k0 - 1] < r[0]:
        raise ConfigError(
            f"start condition rho*r_k0 >= r_1 fails: "
            f"{config.rho}*{r[config.k0 - 1]} < {r[0]} (k0={config.k0}, n={n})"
        )
    m0 = int(r[config.k0 - 1])
    if math.ceil(config.rho * m0) > math.floor((1.0 - config.delta) * m0):
        raise ConfigError(
            f"first window at m={m0} is empty for rho={config.rho}, delta={config.delta}"
        )
    return r


def nearest_feasible_k0(
    n: int,
    K_n: int = DEFAULT_GRID,
    rho: float = DEFAULT_RHO,
    delta: float = DEFAULT_DELTA,
    frac: float = DEFAULT_K0_FRAC,
) -> int:
    """Map a starting fraction of the sample size to a feasible grid index.

    The target is the grid index whose candidate r_i is closest to frac * n
    observations; if the grid conditions fail there, the smallest feasible
    index above it is returned.
    """
    K_n = min(K_n, n)
    r = full_grid(n, K_n)
    target = int(np.argmin(np.abs(r - frac * n))) + 1
    for k0 in range(target, K_n + 1):
        try:
            validate_feasibility(n, AdaptiveConfig(rho=rho, delta=delta, k0=k0, K_n=K_n))
        except ConfigError:
            continue
        return k0
    raise ConfigError(
        f"no feasible starting index for n={n}, K_n={K_n}, rho={rho}, delta={delta}"
    )


def default_config(n: int, **overrides) -> AdaptiveConfig:
    """The default procedure configuration for a sample of size n.

    Window fractions 1/4 and 1/20, a grid of 200 candidates (capped at n),
    critical value 10, and the starting index resolved from the default
    starting fraction of the sample size.
    """
    kwargs = {
        "rho": DEFAULT_RHO,
        "delta": DEFAULT_DELTA,
        "K_n": min(DEFAULT_GRID, n),
        "z": DEFAULT_Z,
    }
    kwargs.update(overrides)
    if "k0" not in kwargs:
        kwargs["k0"] = nearest_feasible_k0(
            n, kwargs["K_n"], kwargs["rho"], kwargs["delta"], DEFAULT_K0_FRAC
        )
    return AdaptiveConfig(**kwargs)


def tested_grid(n: int, config: AdaptiveConfig) -> list:
    """The distinct candidate indices visited by the sweep, in test order."""
    r = validate_feasibility(n, config)
    grid: list = []
    last = -1
    for i in range(config.k0, config.K_n + 1):
        m = int(r[i - 1])
        if m != last:
            grid.append(m)
            last = m
    return grid


def select(sample: Sample, config: AdaptiveConfig, trace: bool = True) -> TailSelection:
    """Run the stagewise procedure and return the selected tail location.

    Tests the grid candidates in order from k0; the first window statistic
    exceeding the critical value stops the sweep.  An infinite window
    statistic (degenerate data) counts as a rejection at that index.
    """
    n = sample.n
    grid = tested_grid(n, config)
    z = config.critical_value(n)
    scan = scan_windows(sample, grid, config.rho, config.delta)
    exceed = np.nonzero(scan.t_max > z)[0]
    if exceed.size:
        w = int(exceed[0])
        m_hat = grid[w]
        k_hat = scan.best_k(w)
        visited = (
            [(m, float(v)) for m, v in zip(grid[: w + 1], scan.t_max[: w + 1])]
            if trace
            else []
        )
        return TailSelection(
            n=n,
            m_hat=m_hat,
            k_hat=k_hat,
            tau_hat=sample.order_stat(k_hat),
            theta_hat=hill(sample, k_hat),
            rejected=True,
            trace=visited,
        )
    # No rejection: keep the whole sample.  The Hill estimate at k = n is
    # undefined, so the full-sample estimate uses the n-1 upper ratios.
    return TailSelection(
        n=n,
        m_hat=grid[-1],
        k_hat=n,
        tau_hat=sample.order_stat(n),
        theta_hat=hill(sample, n - 1) if n >= 2 else 0.0,
        rejected=False,
        trace=[(m, float(v)) for m, v in zip(grid, scan.t_max)] if trace else [],
    )
