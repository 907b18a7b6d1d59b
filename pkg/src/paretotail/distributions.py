"""Analytic test laws with tail functionals and samplers.

Each law exposes cdf/sf/pdf/logpdf and quantile/inverse-survival functions,
the hazard-based tail function alpha(x) = (1 - F(x)) / (x * f(x)), and,
where a closed form exists, the fitted Pareto index of its excess law,

    theta_tail(t) = E[log(X/t) | X > t],

which is the Pareto index minimizing the KL divergence from the excess law
over t.  Sampling is inverse-CDF throughout, so a fixed uniform stream
couples samples across laws and parameter values.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize, special

from ._quad import EPSABS, EPSREL, tail_quad
from .divergences import kl_excess_vs_pareto, kl_pareto
from .estimators import Sample

__all__ = [
    "Law",
    "ExcessLaw",
    "Pareto",
    "ParetoChangePoint",
    "PositiveCauchy",
    "LogGamma",
    "LogPerturbedPareto",
    "Hall",
    "GPD",
    "make_law",
    "law_names",
    "alpha_F",
    "theta_fit",
    "theta_fit_empirical",
    "draw_sample",
    "decomposition_check",
]

_E = math.e


class Law:
    """Base interface for the analytic laws.

    Subclasses must provide ``sf`` and ``logpdf`` plus either a closed
    ``isf`` or positive ``support_left`` (enabling generic numeric
    inversion).  ``rv_index`` holds the index of regular variation where the
    law has one.
    """

    name: str = "law"
    support_left: float = 0.0
    rv_index: float | None = None

    @property
    def params(self) -> dict:
        return {}

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def sf(self, x):
        raise NotImplementedError

    def logpdf(self, x):
        raise NotImplementedError

    def pdf(self, x):
        out = np.exp(self.logpdf(x))
        return float(out) if np.ndim(out) == 0 else out

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        if np.any((u < 0.0) | (u >= 1.0)):
            raise ValueError("quantile levels must lie in [0, 1)")
        return self.isf(1.0 - u)

    def isf(self, s):
        """Inverse survival function, solved numerically unless overridden."""
        return _invert_sf(self, s)

    def alpha(self, x):
        """Reciprocal hazard scaled by x: (1 - F(x)) / (x * f(x))."""
        x = np.asarray(x, dtype=float)
        out = self.sf(x) / (x * self.pdf(x))
        return float(out) if out.ndim == 0 else out

    def theta_tail(self, t: float) -> float | None:
        """Closed-form fitted Pareto index of the excess law over t, if known."""
        return None

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise ValueError(f"sample size must be positive, got {n}")
        return np.asarray(self.ppf(rng.random(n)), dtype=float).reshape(-1)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{type(self).__name__}({inner})"


def _invert_sf(law: Law, s, tol: float = 1e-12):
    """Solve sf(x) = s by bracketing bisection in log space plus Newton polish."""
    s_arr = np.asarray(s, dtype=float)
    scalar = s_arr.ndim == 0
    s_arr = np.atleast_1d(s_arr).astype(float)
    if np.any((s_arr <= 0.0) | (s_arr > 1.0)):
        raise ValueError("survival levels must lie in (0, 1]")
    lo = law.support_left
    if lo <= 0.0:
        raise ValueError(f"numeric inversion needs a positive support start, got {lo}")
    log_lo = np.full_like(s_arr, math.log(lo))
    log_hi = log_lo + 1.0
    for _ in range(200):
        todo = law.sf(np.exp(log_hi)) > s_arr
        if not np.any(todo):
            break
        log_hi = np.where(todo, log_lo + 2.0 * (log_hi - log_lo), log_hi)
    for _ in range(60):
        mid = 0.5 * (log_lo + log_hi)
        above = law.sf(np.exp(mid)) > s_arr
        log_lo = np.where(above, mid, log_lo)
        log_hi = np.where(above, log_hi, mid)
    x = np.exp(0.5 * (log_lo + log_hi))
    for _ in range(4):
        pdf = law.pdf(x)
        step = np.where(pdf > 0.0, (law.sf(x) - s_arr) / np.where(pdf > 0, pdf, 1.0), 0.0)
        x_new = x + step
        x = np.where((x_new >= lo) & np.isfinite(x_new), x_new, x)
        if np.all(np.abs(step) <= tol * np.abs(x)):
            break
    return float(x[0]) if scalar else x


class Pareto(Law):
    """Standard Pareto law: sf(x) = x**(-1/theta) on x >= 1."""

    name = "pareto"
    support_left = 1.0

    def __init__(self, theta: float = 1.0):
        if theta <= 0.0:
            raise ValueError(f"theta must be positive, got {theta}")
        self.theta = float(theta)
        self.rv_index = self.theta

    @property
    def params(self) -> dict:
        return {"theta": self.theta}

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= 1.0, 1.0, np.power(np.maximum(x, 1.0), -1.0 / self.theta))
        return float(out) if out.ndim == 0 else out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(
                x < 1.0,
                -np.inf,
                -math.log(self.theta) - (1.0 / self.theta + 1.0) * np.log(np.maximum(x, 1.0)),
            )
        return float(out) if out.ndim == 0 else out

    def isf(self, s):
        s = np.asarray(s, dtype=float)
        out = np.power(s, -self.theta)
        return float(out) if out.ndim == 0 else out

    def alpha(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, self.theta)
        return float(out) if out.ndim == 0 else out

    def theta_tail(self, t: float) -> float:
        return self.theta


class ParetoChangePoint(Law):
    """Pareto law whose index jumps from theta1 to theta2 at the point tau.

    sf(x) = x**(-1/theta1) up to tau and sf(tau) * (x/tau)**(-1/theta2)
    beyond; the tail index of regular variation is theta2.
    """

    name = "pareto-changepoint"
    support_left = 1.0

    def __init__(self, theta1: float, theta2: float, tau: float):
        if theta1 <= 0.0 or theta2 <= 0.0:
            raise ValueError("both indices must be positive")
        if tau < 1.0:
            raise ValueError(f"change point must satisfy tau >= 1, got {tau}")
        self.theta1 = float(theta1)
        self.theta2 = float(theta2)
        self.tau = float(tau)
        self.rv_index = self.theta2
        self._sf_tau = self.tau ** (-1.0 / self.theta1)

    @property
    def params(self) -> dict:
        return {"theta1": self.theta1, "theta2": self.theta2, "tau": self.tau}

    def density_breaks(self):
        return (self.tau,)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        below = np.power(np.maximum(np.minimum(x, self.tau), 1.0), -1.0 / self.theta1)
        above = self._sf_tau * np.power(np.maximum(x / self.tau, 1.0), -1.0 / self.theta2)
        out = np.where(x <= 1.0, 1.0, np.where(x <= self.tau, below, above))
        return float(out) if out.ndim == 0 else out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        xs = np.maximum(x, 1.0)
        lower = -math.log(self.theta1) - (1.0 / self.theta1 + 1.0) * np.log(xs)
        upper = (
            math.log(self._sf_tau)
            - math.log(self.theta2)
            - (1.0 / self.theta2) * np.log(np.maximum(xs / self.tau, 1e-300))
            - np.log(xs)
        )
        out = np.where(x < 1.0, -np.inf, np.where(x < self.tau, lower, upper))
        return float(out) if out.ndim == 0 else out

    def isf(self, s):
        s = np.asarray(s, dtype=float)
        below = np.power(s, -self.theta1)
        above = self.tau * np.power(s / self._sf_tau, -self.theta2)
        out = np.where(s >= self._sf_tau, below, above)
        return float(out) if out.ndim == 0 else out

    def alpha(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < self.tau, self.theta1, self.theta2)
        return float(out) if out.ndim == 0 else out

    def theta_tail(self, t: float) -> float:
        if t >= self.tau:
            return self.theta2
        return self.theta1 + (self.theta2 - self.theta1) * self._sf_tau / float(self.sf(t))


class PositiveCauchy(Law):
    """Positive half of the Cauchy law: cdf(x) = (2/pi) * arctan(x) on x >= 0."""

    name = "cauchy"
    support_left = 0.0
    rv_index = 1.0

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(
                x <= 0.0, 1.0, (2.0 / math.pi) * np.arctan(1.0 / np.maximum(x, 1e-300))
            )
        return float(out) if out.ndim == 0 else out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(
            x < 0.0, -np.inf, math.log(2.0 / math.pi) - np.log1p(x * x)
        )
        return float(out) if out.ndim == 0 else out

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        if np.any((u < 0.0) | (u >= 1.0)):
            raise ValueError("quantile levels must lie in [0, 1)")
        out = np.tan(0.5 * math.pi * u)
        return float(out) if out.ndim == 0 else out

    def isf(self, s):
        s = np.asarray(s, dtype=float)
        out = 1.0 / np.tan(0.5 * math.pi * s)
        return float(out) if out.ndim == 0 else out


class LogGamma(Law):
    """Law of exp(G) for a gamma variate G: cdf(x) = Gamma_cdf(log x) on x >= 1."""

    name = "loggamma"
    support_left = 1.0

    def __init__(self, rate: float = 1.0, shape: float = 2.0):
        if rate <= 0.0 or shape <= 0.0:
            raise ValueError("rate and shape must be positive")
        self.rate = float(rate)
        self.shape = float(shape)
        self.rv_index = 1.0 / self.rate

    @property
    def params(self) -> dict:
        return {"rate": self.rate, "shape": self.shape}

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(
            x <= 1.0, 0.0, special.gammainc(self.shape, self.rate * np.log(np.maximum(x, 1.0)))
        )
        return float(out) if out.ndim == 0 else out

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(
            x <= 1.0, 1.0, special.gammaincc(self.shape, self.rate * np.log(np.maximum(x, 1.0)))
        )
        return float(out) if out.ndim == 0 else out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        logx = np.log(np.maximum(x, 1e-300))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(
                x <= 1.0,
                -np.inf,
                self.shape * math.log(self.rate)
                + (self.shape - 1.0) * np.log(np.maximum(logx, 1e-300))
                - (self.rate + 1.0) * logx
                - special.gammaln(self.shape),
            )
        return float(out) if out.ndim == 0 else out

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        if np.any((u < 0.0) | (u >= 1.0)):
            raise ValueError("quantile levels must lie in [0, 1)")
        out = np.exp(special.gammaincinv(self.shape, u) / self.rate)
        return float(out) if out.ndim == 0 else out

    def isf(self, s):
        s = np.asarray(s, dtype=float)
        out = np.exp(special.gammainccinv(self.shape, s) / self.rate)
        return float(out) if out.ndim == 0 else out


class LogPerturbedPareto(Law):
    """Pareto tail with a logarithmic perturbation: sf(x) = c * x**(-1/beta) * log(x).

    The normalizing constant c = x0**(1/beta) / log(x0) makes sf(x0) = 1;
    the density is positive for x > exp(beta), so x0 >= exp(beta) is
    required.
    """

    name = "logpareto"

    def __init__(self, beta: float = 1.0, x0: float = _E):
        if beta <= 0.0:
            raise ValueError(f"beta must be positive, got {beta}")
        if x0 < math.exp(beta):
            raise ValueError(
                f"support start must satisfy x0 >= exp(beta) = {math.exp(beta):g}, got {x0}"
            )
        self.beta = float(beta)
        self.x0 = float(x0)
        self.c = x0 ** (1.0 / beta) / math.log(x0)
        self.support_left = self.x0
        self.rv_index = self.beta

    @property
    def params(self) -> dict:
        return {"beta": self.beta, "x0": self.x0}

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        xs = np.maximum(x, self.x0)
        out = np.where(
            x <= self.x0, 1.0, self.c * np.power(xs, -1.0 / self.beta) * np.log(xs)
        )
        return float(out) if out.ndim == 0 else out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        xs = np.maximum(x, self.x0)
        logx = np.log(xs)
        inner = logx / self.beta - 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(
                (x < self.x0) | (inner <= 0.0),
                -np.inf,
                math.log(self.c)
                - (1.0 / self.beta + 1.0) * logx
                + np.log(np.maximum(inner, 1e-300)),
            )
        return float(out) if out.ndim == 0 else out

    def alpha(self, x):
        x = np.asarray(x, dtype=float)
        out = self.beta / (1.0 - self.beta / np.log(np.maximum(x, 1e-300)))
        return float(out) if out.ndim == 0 else out

    def theta_tail(self, t: float) -> float:
        return self.beta * (1.0 + self.beta / math.log(t))


class Hall(Law):
    """Two-term power tail: sf(x) = c_beta * x**(-1/beta) + c_gamma * x**(-1/gamma).

    beta is the dominant (tail) exponent parameter and gamma < beta controls
    the second-order correction; c_gamma may be negative as long as the
    distribution function stays increasing on its support.  The support
    start x0 solves sf(x0) = 1.
    """

    name = "hall"

    def __init__(
        self,
        beta: float = 1.0,
        gamma: float = 0.4,
        c_beta: float = 2.0,
        c_gamma: float = -1.0,
    ):
        if beta <= 0.0 or gamma <= 0.0:
            raise ValueError("exponent parameters must be positive")
        if gamma >= beta:
            raise ValueError(f"need gamma < beta for a second-order term, got {gamma} >= {beta}")
        if c_beta <= 0.0:
            raise ValueError(f"dominant coefficient must be positive, got {c_beta}")
        self.beta = float(beta)
        self.gamma = float(gamma)
        self.c_beta = float(c_beta)
        self.c_gamma = float(c_gamma)
        self.rv_index = self.beta
        self.x0 = self._solve_support_start()
        self.support_left = self.x0

    def _solve_support_start(self) -> float:
        def sf_raw(x):
            return (
                self.c_beta * x ** (-1.0 / self.beta)
                + self.c_gamma * x ** (-1.0 / self.gamma)
            )

        if self.c_gamma < 0.0:
            # Below x_turn the putative density is negative; the support must
            # start at the root of sf = 1 on the decreasing branch.
            ratio = (-self.c_gamma / self.gamma) / (self.c_beta / self.beta)
            x_turn = ratio ** (1.0 / (1.0 / self.gamma - 1.0 / self.beta))
            lo = x_turn
            if sf_raw(lo) < 1.0:
                raise ValueError(
                    "coefficients do not admit an increasing distribution function"
                )
        else:
            lo = 1e-12
        hi = max(2.0 * lo, 2.0)
        while sf_raw(hi) > 1.0:
            hi *= 2.0
        return float(optimize.brentq(lambda x: sf_raw(x) - 1.0, lo, hi, xtol=1e-14, rtol=1e-15))

    @property
    def params(self) -> dict:
        return {
            "beta": self.beta,
            "gamma": self.gamma,
            "c_beta": self.c_beta,
            "c_gamma": self.c_gamma,
        }

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        xs = np.maximum(x, self.x0)
        out = np.where(
            x <= self.x0,
            1.0,
            self.c_beta * np.power(xs, -1.0 / self.beta)
            + self.c_gamma * np.power(xs, -1.0 / self.gamma),
        )
        return float(out) if out.ndim == 0 else out

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        xs = np.maximum(x, self.x0)
        val = (
            self.c_beta / self.beta * np.power(xs, -1.0 / self.beta - 1.0)
            + self.c_gamma / self.gamma * np.power(xs, -1.0 / self.gamma - 1.0)
        )
        out = np.where(x < self.x0, 0.0, np.maximum(val, 0.0))
        return float(out) if out.ndim == 0 else out

    def logpdf(self, x):
        pdf = np.asarray(self.pdf(x), dtype=float)
        with np.errstate(divide="ignore"):
            out = np.log(pdf)
        return float(out) if out.ndim == 0 else out

    def alpha(self, x):
        x = np.asarray(x, dtype=float)
        tb = self.c_beta * np.power(x, -1.0 / self.beta)
        tg = self.c_gamma * np.power(x, -1.0 / self.gamma)
        out = (tb + tg) / (tb / self.beta + tg / self.gamma)
        return float(out) if out.ndim == 0 else out

    def theta_tail(self, t: float) -> float:
        tb = self.c_beta * t ** (-1.0 / self.beta)
        tg = self.c_gamma * t ** (-1.0 / self.gamma)
        return (self.beta * tb + self.gamma * tg) / (tb + tg)


class GPD(Law):
    """Unit-shape generalized Pareto law: sf(x) = 1 / (1 + x) on x >= 0."""

    name = "gpd"
    support_left = 0.0
    rv_index = 1.0

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= 0.0, 1.0, 1.0 / (1.0 + np.maximum(x, 0.0)))
        return float(out) if out.ndim == 0 else out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0.0, -np.inf, -2.0 * np.log1p(np.maximum(x, 0.0)))
        return float(out) if out.ndim == 0 else out

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        if np.any((u < 0.0) | (u >= 1.0)):
            raise ValueError("quantile levels must lie in [0, 1)")
        out = u / (1.0 - u)
        return float(out) if out.ndim == 0 else out

    def isf(self, s):
        s = np.asarray(s, dtype=float)
        out = (1.0 - s) / s
        return float(out) if out.ndim == 0 else out


class ExcessLaw(Law):
    """The law of X / t conditioned on X > t, supported on [1, inf)."""

    name = "excess"
    support_left = 1.0

    def __init__(self, base: Law, t: float):
        if t < base.support_left:
            raise ValueError(f"threshold {t} lies below the support of {base!r}")
        sf_t = float(base.sf(t))
        if sf_t <= 0.0:
            raise ValueError(f"threshold {t} has no mass above it under {base!r}")
        self.base = base
        self.t = float(t)
        self._sf_t = sf_t
        self.rv_index = base.rv_index

    @property
    def params(self) -> dict:
        return {"t": self.t, **{f"base_{k}": v for k, v in self.base.params.items()}}

    def density_breaks(self):
        breaks = getattr(self.base, "density_breaks", None)
        if breaks is None:
            return ()
        return tuple(b / self.t for b in breaks() if b / self.t > 1.0)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= 1.0, 1.0, self.base.sf(self.t * np.maximum(x, 1.0)) / self._sf_t)
        return float(out) if out.ndim == 0 else out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(
            x < 1.0,
            -np.inf,
            math.log(self.t)
            + self.base.logpdf(self.t * np.maximum(x, 1.0))
            - math.log(self._sf_t),
        )
        return float(out) if out.ndim == 0 else out

    def isf(self, s):
        s = np.asarray(s, dtype=float)
        out = self.base.isf(s * self._sf_t) / self.t
        return float(out) if out.ndim == 0 else out


_LAW_FACTORIES = {
    "pareto": Pareto,
    "pareto-changepoint": ParetoChangePoint,
    "changepoint": ParetoChangePoint,
    "cauchy": PositiveCauchy,
    "loggamma": LogGamma,
    "logpareto": LogPerturbedPareto,
    "hall": Hall,
    "gpd": GPD,
}


def law_names() -> list:
    return sorted(set(_LAW_FACTORIES) - {"changepoint"})


def make_law(name: str, **params) -> Law:
    """Instantiate a law by registry name; unknown names are rejected."""
    key = name.strip().lower()
    if key not in _LAW_FACTORIES:
        raise ValueError(f"unknown law {name!r}; available: {', '.join(law_names())}")
    return _LAW_FACTORIES[key](**params)


def alpha_F(law: Law, x):
    """The tail function alpha(x) = (1 - F(x)) / (x * f(x)) of the law."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < law.support_left):
        raise ValueError(f"point below the support of {law!r}")
    if np.any(np.asarray(law.sf(x_arr)) <= 0.0):
        raise ValueError(f"point has no mass above it under {law!r}")
    return law.alpha(x)


def theta_fit(
    law: Law,
    t: float,
    method: str = "auto",
    epsabs: float = EPSABS,
    epsrel: float = EPSREL,
) -> float:
    """Fitted Pareto index of the excess law over t.

    Computed as the mean log-excess E[log(X/t) | X > t].  ``method`` selects
    the closed form ("closed"), the tail quadrature ("quadrature"), or the
    closed form with quadrature fallback ("auto").
    """
    if method not in ("auto", "closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    sf_t = float(law.sf(t))
    if sf_t <= 0.0:
        raise ValueError(f"threshold t={t} has no mass above it under {law!r}")
    if method in ("auto", "closed"):
        closed = law.theta_tail(t)
        if closed is not None:
            return float(closed)
        if method == "closed":
            raise ValueError(f"{law!r} has no closed-form fitted index")
    excess = ExcessLaw(law, t)

    def integrand(x: float) -> float:
        lf = excess.logpdf(x)
        if lf == -math.inf:
            return 0.0
        return math.log(x) * math.exp(lf)

    return tail_quad(integrand, breaks=excess.density_breaks(), epsabs=epsabs, epsrel=epsrel)


def theta_fit_empirical(sample: Sample, k: int, law: Law) -> float:
    """Plug-in approximation of the fitted index from the top k order statistics.

    Averages alpha over X_(1), ..., X_(k); for an exact Pareto law this is
    the Pareto index itself for every sample.  Used for diagnostic overlays
    against the Hill trajectory when the generating law is known.
    """
    if not 1 <= k <= sample.n:
        raise ValueError(f"k must lie in 1..{sample.n}, got {k}")
    top = sample.sorted_desc[:k]
    if np.any(top < law.support_left):
        raise ValueError(f"order statistic below the support of {law!r}")
    return float(np.mean(law.alpha(top)))


def draw_sample(law: Law, n: int, rng: np.random.Generator) -> Sample:
    """n independent draws from the law as a Sample, via inverse-CDF sampling."""
    return Sample(law.sample(n, rng))


def decomposition_check(
    law: Law, t: float, theta: float, epsabs: float = EPSABS, epsrel: float = EPSREL
):
    """The Pythagorean split of the excess KL divergence at the fitted index.

    Returns (KL(F_t, P_theta), KL(F_t, P_fit), KL(fit, theta)); the first
    term equals the sum of the other two up to quadrature error.
    """
    fit = theta_fit(law, t, epsabs=epsabs, epsrel=epsrel)
    first = kl_excess_vs_pareto(law, t, theta, epsabs=epsabs, epsrel=epsrel)
    second = kl_excess_vs_pareto(law, t, fit, epsabs=epsabs, epsrel=epsrel)
    third = kl_pareto(fit, theta)
    return first, second, third
