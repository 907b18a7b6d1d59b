"""Shared tail-integral machinery for divergence and tail-functional quadratures."""

from __future__ import annotations

import math

from scipy import integrate

# Default tolerances used by every tail quadrature in the package.
EPSABS = 1e-9
EPSREL = 1e-8


class QuadratureError(RuntimeError):
    """Raised when an adaptive quadrature fails to reach the requested tolerance.

    Attributes:
        residual: the integrator's own estimate of the remaining absolute error.
    """

    def __init__(self, message: str, residual: float = math.nan):
        super().__init__(message)
        self.residual = residual


def tail_quad(fn, breaks=(), epsabs: float = EPSABS, epsrel: float = EPSREL) -> float:
    """Integrate ``fn(x)`` over x in [1, inf).

    Uses the substitution u = 1/x, which maps the domain onto (0, 1] and
    compresses the tail into the left endpoint, where the adaptive rule
    concentrates its effort.  ``breaks`` lists interior x points where the
    integrand is non-smooth (e.g. a change-point kink); they are forwarded to
    the integrator as the corresponding u values.
    """
    points = sorted(1.0 / b for b in breaks if b > 1.0 and math.isfinite(b))

    def g(u):
        x = 1.0 / u
        return fn(x) * x * x

    out = integrate.quad(
        g, 0.0, 1.0, points=points or None,
        epsabs=epsabs, epsrel=epsrel, limit=200, full_output=True,
    )
    value, abserr = out[0], out[1]
    if len(out) > 3 or not math.isfinite(value):
        # quad appends an explanatory message when it could not meet the
        # tolerances; accept the result only if the residual is still small.
        tol = max(epsabs, epsrel * abs(value)) * 100.0
        if not math.isfinite(value) or abserr > tol:
            raise QuadratureError(
                f"tail quadrature did not converge: {out[3] if len(out) > 3 else value}",
                residual=abserr,
            )
    return value


def doubling_tail_integral(
    fn,
    breaks=(),
    epsabs: float = EPSABS,
    epsrel: float = EPSREL,
    max_doublings: int = 60,
) -> float:
    """Integrate ``fn(x)`` over [1, inf) when the integral may genuinely diverge.

    Partial integrals over [1, 2], [2, 4], ... are accumulated; once the
    segment contributions decay geometrically the remaining tail is
    extrapolated and added.  If the contributions have not started to vanish
    after ``max_doublings`` doublings (truncation point 2**60), the integral
    is reported as ``inf`` rather than as a spuriously finite value.
    """
    total = 0.0
    prev_seg = None
    prev_estimate = None
    non_decreasing = 0
    lo = 1.0
    for _ in range(max_doublings):
        hi = 2.0 * lo
        pts = [b for b in breaks if lo < b < hi] or None
        seg = integrate.quad(
            fn, lo, hi, points=pts, epsabs=epsabs * 0.1, epsrel=epsrel,
            limit=200, full_output=True,
        )[0]
        if not math.isfinite(seg):
            return math.inf
        total += seg
        tol = max(epsabs, epsrel * abs(total))
        if prev_seg is not None:
            if seg >= prev_seg > tol:
                # Contributions that stop shrinking signal an integrand with
                # a tail at or above 1/x: the integral diverges.
                non_decreasing += 1
                if non_decreasing >= 5:
                    return math.inf
            else:
                non_decreasing = 0
            if 0.0 <= seg < prev_seg:
                if seg <= tol and prev_seg <= tol:
                    return total
                # Geometric extrapolation of the remaining tail; accept once
                # consecutive extrapolated totals agree within tolerance.
                ratio = seg / prev_seg
                estimate = total + seg * ratio / (1.0 - ratio)
                if prev_estimate is not None and abs(estimate - prev_estimate) <= tol:
                    return estimate
                prev_estimate = estimate
            else:
                prev_estimate = None
        prev_seg = seg
        lo = hi
    return math.inf
