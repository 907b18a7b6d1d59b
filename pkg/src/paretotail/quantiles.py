"""Extreme-quantile estimators: fixed-k extrapolation and the adaptive plug-in.

Below the data range (p < 1 - k/n) the estimate is the sample quantile
X_([n(1-p)]); beyond it the tail is extrapolated along the fitted Pareto
law, X_(k) * (k / (n(1-p)))**h with h the Hill estimate at k.  Both branches
agree at p = 1 - k/n and are homogeneous of degree 1 in the data.
"""

from __future__ import annotations

import numpy as np

from .adaptive import TailSelection
from .estimators import Sample, hill

__all__ = ["sample_quantile_index", "quantile_fixed_k", "quantile_adaptive"]

# Absorbs float noise in n*(1-p) before the floor, so that levels meant to
# hit an integer index do.
_INDEX_FUZZ = 1e-9


def sample_quantile_index(n: int, p) -> np.ndarray:
    """The order-statistic index [n(1-p)], clamped to 1..n; accepts arrays."""
    p = np.asarray(p, dtype=float)
    idx = np.floor(n * (1.0 - p) + _INDEX_FUZZ).astype(int)
    return np.clip(idx, 1, n)


def _weissman(sample: Sample, k: int, p, exponent: float):
    n = sample.n
    p = np.asarray(p, dtype=float)
    base = sample.sorted_desc[k - 1]
    ratio = k / (n * (1.0 - p))
    tail = base * np.power(ratio, exponent)
    low = sample.sorted_desc[sample_quantile_index(n, p) - 1]
    return np.where(p < 1.0 - k / n, low, tail)


def quantile_fixed_k(sample: Sample, k: int, p):
    """Quantile estimate at level p using the k upper order statistics.

    Requires 2 <= k <= n and 0 < p < 1; the extrapolation exponent is the
    Hill estimate at k (at k = n, where that is undefined, the estimate over
    the n-1 upper ratios is used).  Accepts an array of levels.
    """
    n = sample.n
    if not 2 <= k <= n:
        raise ValueError(f"k must lie in 2..{n}, got {k}")
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr <= 0.0) | (p_arr >= 1.0)):
        raise ValueError("levels must lie in (0, 1)")
    exponent = hill(sample, min(k, n - 1))
    out = _weissman(sample, k, p_arr, exponent)
    return float(out) if out.ndim == 0 else out


def quantile_adaptive(sample: Sample, selection: TailSelection, p):
    """Quantile estimate at level p using the adaptively selected tail.

    Equals the fixed-k estimate at k_hat by construction, since the
    selection's index estimate is the Hill estimate at k_hat.
    """
    if selection.n != sample.n:
        raise ValueError(
            f"selection was made on a sample of size {selection.n}, got {sample.n}"
        )
    n = sample.n
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr <= 0.0) | (p_arr >= 1.0)):
        raise ValueError("levels must lie in (0, 1)")
    out = _weissman(sample, selection.k_hat, p_arr, selection.theta_hat)
    return float(out) if out.ndim == 0 else out
