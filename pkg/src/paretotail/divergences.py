"""Divergences between Pareto laws and between excess distributions and Pareto laws.

The standard Pareto law with index theta > 0 has distribution function
1 - x**(-1/theta) on x >= 1.  The Kullback-Leibler divergence between two
such laws depends on the indices only through their ratio:

    KL(theta1, theta2) = G(theta1/theta2 - 1),   G(x) = x - log(1 + x),

and is extended to +inf when either index is 0.  The excess distribution of
a law F over a threshold t, defined by 1 - (1 - F(tx)) / (1 - F(t)) on
x >= 1, is compared against a Pareto law by numerical quadrature.
"""

from __future__ import annotations

import math

import numpy as np

from ._quad import EPSABS, EPSREL, QuadratureError, doubling_tail_integral, tail_quad

__all__ = [
    "QuadratureError",
    "g_pareto",
    "kl_pareto",
    "rho_star",
    "kl_excess_vs_pareto",
    "chi2_excess_vs_pareto",
]

# Below this the direct expression x - log1p(x) loses most of its digits.
_G_SERIES_CUTOFF = 1e-4


def _g_series(x):
    return x * x * (1.0 / 2.0 + x * (-1.0 / 3.0 + x * (1.0 / 4.0 - x / 5.0)))


def g_pareto(x):
    """G(x) = x - log(1 + x), the shape function of the Pareto KL divergence.

    Accepts scalars or arrays.  Near 0 the difference is evaluated via the
    series x**2/2 - x**3/3 + x**4/4 - x**5/5 to avoid cancellation; KL values
    near 0 feed test-statistic comparisons, so the small regime matters.
    """
    if np.ndim(x) == 0:
        xv = float(x)
        if abs(xv) < _G_SERIES_CUTOFF:
            return _g_series(xv)
        # np.log1p, not math.log1p: keeps the scalar and array paths
        # bit-identical.
        return xv - float(np.log1p(xv))
    x = np.asarray(x, dtype=float)
    out = x - np.log1p(x)
    small = np.abs(x) < _G_SERIES_CUTOFF
    if small.any():
        xs = x[small]
        out[small] = _g_series(xs)
    return out


def kl_pareto(theta1: float, theta2: float) -> float:
    """Kullback-Leibler divergence KL(theta1, theta2) between two Pareto laws.

    Returns +inf when either index is 0 (the degenerate-estimate convention).
    Raises ValueError for negative indices.
    """
    if theta1 < 0.0 or theta2 < 0.0:
        raise ValueError(f"Pareto indices must be >= 0, got ({theta1}, {theta2})")
    if theta1 == 0.0 or theta2 == 0.0:
        return math.inf
    return g_pareto(theta1 / theta2 - 1.0)


def rho_star(x: float, y: float) -> float:
    """max(|log(x/y)|, |1/x - 1/y|), a symmetric distance on (0, inf)."""
    if x <= 0.0 or y <= 0.0:
        raise ValueError(f"rho_star requires positive arguments, got ({x}, {y})")
    # log(x) - log(y) rather than log(x/y): exactly symmetric in floats.
    return max(abs(math.log(x) - math.log(y)), abs(1.0 / x - 1.0 / y))


def _log_excess_density(law, t: float):
    """Return x -> log density of the excess law of ``law`` over t, on x >= 1."""
    log_sf_t = math.log(law.sf(t))
    log_t = math.log(t)

    def log_ft(x: float) -> float:
        return log_t + float(law.logpdf(t * x)) - log_sf_t

    return log_ft


def _excess_breaks(law, t: float):
    breaks = getattr(law, "density_breaks", None)
    if breaks is None:
        return ()
    return tuple(b / t for b in breaks() if b / t > 1.0)


def _check_excess_args(law, t: float, theta: float) -> None:
    if t < getattr(law, "support_left", 0.0):
        raise ValueError(f"threshold t={t} lies below the support of {law!r}")
    if law.sf(t) <= 0.0:
        raise ValueError(f"threshold t={t} has no mass above it under {law!r}")
    if theta <= 0.0:
        raise ValueError(f"Pareto index must be positive, got {theta}")


def kl_excess_vs_pareto(
    law, t: float, theta: float, epsabs: float = EPSABS, epsrel: float = EPSREL
) -> float:
    """KL divergence of the excess law of ``law`` over t from the Pareto(theta) law.

    Computed as the tail integral of log(f_t / p_theta) weighted by the excess
    density f_t, where p_theta(x) = (1/theta) * x**(-1/theta - 1).
    """
    _check_excess_args(law, t, theta)
    log_ft = _log_excess_density(law, t)
    log_theta = math.log(theta)
    inv_theta_p1 = 1.0 / theta + 1.0

    def integrand(x: float) -> float:
        lf = log_ft(x)
        if lf == -math.inf:
            return 0.0
        w = lf + log_theta + inv_theta_p1 * math.log(x)
        return w * math.exp(lf)

    return tail_quad(integrand, breaks=_excess_breaks(law, t), epsabs=epsabs, epsrel=epsrel)


def chi2_excess_vs_pareto(
    law, t: float, theta: float, epsabs: float = EPSABS, epsrel: float = EPSREL
) -> float:
    """Chi-squared divergence of the excess law over t from the Pareto(theta) law.

    The integral converges only when the excess density's tail is thin enough
    relative to Pareto(theta); divergence is detected numerically from the
    partial integrals over doubling truncations and reported as +inf.
    """
    _check_excess_args(law, t, theta)
    log_ft = _log_excess_density(law, t)
    log_theta = math.log(theta)
    inv_theta_p1 = 1.0 / theta + 1.0

    def integrand(x: float) -> float:
        lf = log_ft(x)
        if lf == -math.inf:
            return 0.0
        v = 2.0 * lf + log_theta + inv_theta_p1 * math.log(x)
        if v > 700.0:
            return math.inf
        return math.exp(v)

    value = doubling_tail_integral(
        integrand, breaks=_excess_breaks(law, t), epsabs=epsabs, epsrel=epsrel
    )
    if not math.isfinite(value):
        return math.inf
    return value - 1.0
