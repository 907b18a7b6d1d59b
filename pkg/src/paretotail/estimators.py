"""Order-statistics handling and the point estimators of the tail index.

Everything here operates on a :class:`Sample` of strictly positive
observations.  Exceedance counts use strict inequality throughout: the count
above a threshold t is #{i : X_i > t}.  The 0/0 indeterminacy arising when no
observation exceeds the threshold resolves each estimator to 0.
"""

from __future__ import annotations

import math

import numpy as np

from .divergences import g_pareto

__all__ = [
    "Sample",
    "hill",
    "hill_curve",
    "count_exceed",
    "count_band",
    "theta_local",
    "theta_band",
    "loglik_ratio",
]


class Sample:
    """Immutable positive observations with cached descending order statistics.

    Ties are permitted; the descending order breaks ties by original index
    (stable sort).  Non-positive observations are rejected at construction,
    since every estimator takes logarithms of ratios of the data.
    """

    __slots__ = ("values", "order_desc", "sorted_desc", "has_ties",
                 "_sorted_asc", "_log_desc", "_log_cumsum")

    def __init__(self, values):
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1:
            arr = arr.reshape(-1)
        if arr.size < 1:
            raise ValueError("a sample needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sample contains non-finite observations")
        if np.any(arr <= 0.0):
            bad = int(np.argmax(arr <= 0.0))
            raise ValueError(
                f"non-positive observation {arr[bad]} at position {bad}; "
                "all observations must be strictly positive"
            )
        self.values = arr.copy()
        self.values.flags.writeable = False
        order = np.argsort(-self.values, kind="stable")
        self.order_desc = order
        self.order_desc.flags.writeable = False
        self.sorted_desc = self.values[order]
        self.sorted_desc.flags.writeable = False
        self._sorted_asc = self.sorted_desc[::-1]
        self.has_ties = bool(np.any(self.sorted_desc[1:] == self.sorted_desc[:-1]))
        self._log_desc = np.log(self.sorted_desc)
        # _log_cumsum[j] = sum of the j largest log observations.
        self._log_cumsum = np.concatenate(([0.0], np.cumsum(self._log_desc)))

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def order_stat(self, k: int):
        """k-th descending order statistic X_(k), 1-indexed; accepts arrays."""
        k = np.asarray(k)
        if np.any(k < 1) or np.any(k > self.n):
            raise ValueError(f"order statistic index out of range 1..{self.n}")
        out = self.sorted_desc[k - 1]
        return float(out) if out.ndim == 0 else out

    def count_above(self, t):
        """Number of observations strictly above t; accepts arrays."""
        c = self.n - np.searchsorted(self._sorted_asc, t, side="right")
        return int(c) if np.ndim(t) == 0 else c

    def log_top_sum(self, m):
        """Sum of the logs of the m largest observations; accepts arrays."""
        out = self._log_cumsum[m]
        return float(out) if np.ndim(m) == 0 else out

    def __repr__(self) -> str:
        return f"Sample(n={self.n}, max={self.sorted_desc[0]:g}, min={self.sorted_desc[-1]:g})"


def count_exceed(sample: Sample, t: float) -> int:
    """Number of observations strictly above t."""
    return sample.count_above(t)


def count_band(sample: Sample, t: float, tau: float) -> int:
    """Number of observations in (t, tau]."""
    if tau < t:
        raise ValueError(f"band requires t <= tau, got t={t}, tau={tau}")
    return sample.count_above(t) - sample.count_above(tau)


def hill(sample: Sample, k: int) -> float:
    """Hill estimator over the k largest observations.

    Mean of log(X_(i) / X_(k+1)) for i = 1..k; defined for 1 <= k <= n - 1.
    """
    n = sample.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"hill requires 1 <= k <= n-1 = {n - 1}, got k={k}")
    return sample.log_top_sum(k) / k - sample._log_desc[k]


def hill_curve(sample: Sample) -> np.ndarray:
    """The whole Hill trajectory: entry j-1 holds the estimate at k = j, j = 1..n-1."""
    n = sample.n
    if n < 2:
        raise ValueError("hill curve needs at least two observations")
    k = np.arange(1, n)
    return sample._log_cumsum[1:n] / k - sample._log_desc[1:n]


def theta_local(sample: Sample, t: float) -> float:
    """Mean log-excess over the threshold t, the local tail-index estimate.

    Equals the Hill estimator at k when t is the (k+1)-th descending order
    statistic of a sample with distinct values; returns 0 when nothing
    exceeds t.
    """
    if t <= 0.0:
        raise ValueError(f"threshold must be positive, got t={t}")
    n_t = sample.count_above(t)
    if n_t == 0:
        return 0.0
    return sample.log_top_sum(n_t) / n_t - math.log(t)


def theta_band(sample: Sample, t: float, tau: float) -> float:
    """Tail-index estimate from the observations in the band (t, tau].

    Computed as (n_t * theta_t - n_tau * theta_tau) / n_band; returns 0 when
    the band is empty (in particular when t is at or above the maximum).
    """
    if t <= 0.0:
        raise ValueError(f"threshold must be positive, got t={t}")
    if tau < t:
        raise ValueError(f"band requires t <= tau, got t={t}, tau={tau}")
    n_t = sample.count_above(t)
    n_tau = sample.count_above(tau)
    n_band = n_t - n_tau
    if n_band == 0:
        return 0.0
    top_t = sample.log_top_sum(n_t) - n_t * math.log(t)
    top_tau = sample.log_top_sum(n_tau) - n_tau * math.log(tau) if n_tau else 0.0
    return (top_t - top_tau) / n_band


def loglik_ratio(sample: Sample, t: float, theta_alt: float, theta_null: float) -> float:
    """Log likelihood ratio of Pareto(theta_alt) vs Pareto(theta_null) on the tail above t.

    Closed form n_t * [log(theta_null/theta_alt) + (1/theta_null - 1/theta_alt)
    * theta_t_hat]; at theta_alt equal to the local estimate this reduces to
    n_t times the Pareto KL divergence between the estimate and theta_null.
    """
    if theta_alt <= 0.0 or theta_null <= 0.0:
        raise ValueError(
            f"indices must be positive, got alt={theta_alt}, null={theta_null}"
        )
    if t <= 0.0:
        raise ValueError(f"threshold must be positive, got t={t}")
    n_t = sample.count_above(t)
    if n_t == 0:
        return 0.0
    th_hat = sample.log_top_sum(n_t) / n_t - math.log(t)
    # Evaluated as G(r - 1) + (th_hat/theta_alt - 1) * (r - 1) with
    # r = theta_alt/theta_null: algebraically the same as
    # log(theta_null/theta_alt) + (1/theta_null - 1/theta_alt) * th_hat but
    # free of cancellation when the two indices nearly coincide.
    r = theta_alt / theta_null
    return n_t * (g_pareto(r - 1.0) + (th_hat / theta_alt - 1.0) * (r - 1.0))
