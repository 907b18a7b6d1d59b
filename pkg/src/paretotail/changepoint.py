"""Lack-of-fit test statistics for a Pareto tail against a two-segment alternative.

For thresholds t < tau the statistic splits into a band component and a tail
component,

    T(t, tau) = n_band * KL(theta_band, theta_t) + n_tau * KL(theta_tau, theta_t),

where theta_t, theta_tau and theta_band are the local estimates above t,
above tau, and in the band (t, tau].  The windowed statistic at index m scans
tau = X_(k) over k in [ceil(rho*m), floor((1-delta)*m)] with t = X_(m) fixed.

For Pareto data the statistics are invariant under the power transform
x -> x**c, so their null distribution does not depend on the Pareto index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divergences import g_pareto
from .estimators import Sample

__all__ = [
    "TestStatPair",
    "WindowResult",
    "WindowScan",
    "ConfigError",
    "t_pair",
    "t_window",
    "scan_windows",
]


class ConfigError(ValueError):
    """A procedure configuration violates one of its feasibility conditions."""


@dataclass(frozen=True)
class TestStatPair:
    """Band component, tail component, and their sum."""

    t1: float
    t2: float
    total: float

    @classmethod
    def from_parts(cls, t1: float, t2: float) -> "TestStatPair":
        return cls(t1=t1, t2=t2, total=t1 + t2)


@dataclass
class WindowResult:
    """Windowed maximum statistic at a tested index m.

    ``best_k`` is the argmax of the tail component alone (smallest k on
    ties); ``t_max`` is the maximum of the combined statistic over the
    window.  ``per_k`` optionally records every (k, TestStatPair) evaluated.
    """

    m: int
    k_lo: int
    k_hi: int
    best_k: int
    t_max: float
    per_k: list | None = None


def _k_term(count, est, ref):
    """count * KL(est, ref) with the 0-count and 0-estimate conventions.

    A term with an empty count contributes 0.  A zero estimate with a
    positive count yields +inf (the divergence-to-a-degenerate-law
    convention); such windows surface an infinite statistic rather than
    silently masking the degeneracy.
    """
    count = np.asarray(count, dtype=float)
    est = np.asarray(est, dtype=float)
    ref = np.asarray(ref, dtype=float)
    degenerate = (est <= 0.0) | (ref <= 0.0)
    if degenerate.any():
        safe_ratio = np.where(degenerate, 1.0, est / np.where(degenerate, 1.0, ref))
        term = count * g_pareto(safe_ratio - 1.0)
        term = np.where(degenerate & (count > 0), np.inf, term)
    else:
        term = count * g_pareto(est / ref - 1.0)
    return np.where(count == 0, 0.0, term)


def t_pair(sample: Sample, t: float, tau: float) -> TestStatPair:
    """Two-component lack-of-fit statistic for the threshold pair t < tau."""
    if not 0.0 < t < tau:
        raise ValueError(f"t_pair requires 0 < t < tau, got t={t}, tau={tau}")
    n_t = sample.count_above(t)
    n_tau = sample.count_above(tau)
    n_band = n_t - n_tau
    log_t = math.log(t)
    log_tau = math.log(tau)
    theta_t = sample.log_top_sum(n_t) / n_t - log_t if n_t else 0.0
    theta_tau = sample.log_top_sum(n_tau) / n_tau - log_tau if n_tau else 0.0
    if n_band:
        theta_band = (
            sample.log_top_sum(n_t) - n_t * log_t
            - (sample.log_top_sum(n_tau) - n_tau * log_tau)
        ) / n_band
    else:
        theta_band = 0.0
    t1 = float(_k_term(n_band, theta_band, theta_t))
    t2 = float(_k_term(n_tau, theta_tau, theta_t))
    return TestStatPair.from_parts(t1, t2)


def window_bounds(m: int, rho: float, delta: float) -> tuple:
    """Integer k range [ceil(rho*m), floor((1-delta)*m)] of the window at m."""
    return math.ceil(rho * m), math.floor((1.0 - delta) * m)


def t_window(
    sample: Sample, m: int, rho: float, delta: float, collect: bool = False
) -> WindowResult:
    """Maximum of the pair statistic over the change-point window at index m.

    Evaluates T at t = X_(m), tau = X_(k) for every integer k in
    [ceil(rho*m), floor((1-delta)*m)].  Ceiling and floor keep k strictly
    inside the stated real inequalities.
    """
    n = sample.n
    if not 2 <= m <= n:
        raise ValueError(f"window index m must lie in 2..{n}, got {m}")
    k_lo, k_hi = window_bounds(m, rho, delta)
    if k_lo > k_hi or k_lo < 1:
        raise ConfigError(
            f"empty change-point window at m={m}: rho={rho}, delta={delta} "
            f"give k range [{k_lo}, {k_hi}]"
        )
    t = sample.sorted_desc[m - 1]
    n_t = sample.count_above(t)
    log_t = math.log(t)
    theta_t = sample.log_top_sum(n_t) / n_t - log_t if n_t else 0.0
    top_t = sample.log_top_sum(n_t) - n_t * log_t

    ks = np.arange(k_lo, k_hi + 1)
    taus = sample.sorted_desc[ks - 1]
    log_taus = np.log(taus)
    n_taus = sample.count_above(taus)
    n_bands = n_t - n_taus
    with np.errstate(divide="ignore", invalid="ignore"):
        theta_taus = np.where(
            n_taus > 0,
            sample.log_top_sum(n_taus) / np.maximum(n_taus, 1) - log_taus,
            0.0,
        )
        top_taus = np.where(
            n_taus > 0, sample.log_top_sum(n_taus) - n_taus * log_taus, 0.0
        )
        theta_bands = np.where(
            n_bands > 0, (top_t - top_taus) / np.maximum(n_bands, 1), 0.0
        )
    t1 = _k_term(n_bands, theta_bands, theta_t)
    t2 = _k_term(n_taus, theta_taus, theta_t)
    # Coincident thresholds (possible under ties) carry no band information.
    tied = taus <= t
    t1 = np.where(tied, 0.0, t1)
    t2 = np.where(tied, 0.0, t2)
    totals = t1 + t2

    best_idx = int(np.argmax(t2))
    result = WindowResult(
        m=m,
        k_lo=k_lo,
        k_hi=k_hi,
        best_k=int(ks[best_idx]),
        t_max=float(np.max(totals)),
    )
    if collect:
        result.per_k = [
            (int(k), TestStatPair.from_parts(float(a), float(b)))
            for k, a, b in zip(ks, t1, t2)
        ]
    return result


@dataclass
class WindowScan:
    """Flat evaluation of the windowed statistics over a list of tested indices.

    Segment w covers the flat slice [starts[w], starts[w+1]) of ``ks``,
    ``t2`` and ``totals``; ``t_max[w]`` is the window maximum at ms[w].
    """

    ms: np.ndarray
    starts: np.ndarray
    ks: np.ndarray
    t2: np.ndarray
    totals: np.ndarray
    t_max: np.ndarray

    def best_k(self, w: int) -> int:
        """Argmax of the tail component in window w, smallest k on ties."""
        lo = self.starts[w]
        hi = self.starts[w + 1] if w + 1 < self.starts.size else self.ks.size
        return int(self.ks[lo + int(np.argmax(self.t2[lo:hi]))])


def scan_windows(sample: Sample, ms, rho: float, delta: float) -> WindowScan:
    """Evaluate the windowed statistic at every tested index in one pass.

    For tie-free samples the exceedance count above X_(j) is exactly j - 1,
    which lets all (m, k) pairs be evaluated with flat array arithmetic.
    Samples with ties take the generic per-window path instead.
    """
    ms = np.asarray(ms, dtype=np.int64)
    if ms.size == 0:
        raise ValueError("no tested indices")
    if np.any(ms < 2) or np.any(ms > sample.n):
        raise ValueError(f"tested indices must lie in 2..{sample.n}")
    k_lo = np.ceil(rho * ms).astype(np.int64)
    k_hi = np.floor((1.0 - delta) * ms).astype(np.int64)
    if np.any(k_lo > k_hi) or np.any(k_lo < 1):
        m_bad = int(ms[np.argmax((k_lo > k_hi) | (k_lo < 1))])
        raise ConfigError(
            f"empty change-point window at m={m_bad}: rho={rho}, delta={delta}"
        )

    if sample.has_ties:
        t2_parts, tot_parts, k_parts, maxes = [], [], [], []
        for m in ms:
            w = t_window(sample, int(m), rho, delta, collect=True)
            k_parts.append([k for k, _ in w.per_k])
            t2_parts.append([p.t2 for _, p in w.per_k])
            tot_parts.append([p.total for _, p in w.per_k])
            maxes.append(w.t_max)
        sizes = np.array([len(p) for p in k_parts], dtype=np.int64)
        starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
        return WindowScan(
            ms=ms,
            starts=starts,
            ks=np.concatenate(k_parts).astype(np.int64),
            t2=np.concatenate(t2_parts),
            totals=np.concatenate(tot_parts),
            t_max=np.asarray(maxes),
        )

    sizes = k_hi - k_lo + 1
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    seg = np.repeat(np.arange(ms.size), sizes)
    flat = np.arange(int(sizes.sum()))
    ks = k_lo[seg] + (flat - starts[seg])

    S = sample._log_cumsum
    L = sample._log_desc
    m_pair = ms[seg]
    n_t = m_pair - 1
    n_tau = ks - 1
    n_band = m_pair - ks
    log_t = L[m_pair - 1]
    log_tau = L[ks - 1]
    theta_t = S[n_t] / n_t - log_t
    with np.errstate(divide="ignore", invalid="ignore"):
        theta_tau = np.where(n_tau > 0, S[n_tau] / np.maximum(n_tau, 1) - log_tau, 0.0)
    top_t = S[n_t] - n_t * log_t
    top_tau = np.where(n_tau > 0, S[n_tau] - n_tau * log_tau, 0.0)
    theta_band = (top_t - top_tau) / n_band
    t1 = _k_term(n_band, theta_band, theta_t)
    t2 = _k_term(n_tau, theta_tau, theta_t)
    totals = t1 + t2
    t_max = np.maximum.reduceat(totals, starts)
    return WindowScan(ms=ms, starts=starts, ks=ks, t2=t2, totals=totals, t_max=t_max)
