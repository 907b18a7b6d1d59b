import math
from decimal import Decimal, getcontext

import numpy as np
import pytest

from paretotail import (
    GPD,
    Hall,
    LogPerturbedPareto,
    Pareto,
    chi2_excess_vs_pareto,
    g_pareto,
    kl_excess_vs_pareto,
    kl_pareto,
    rho_star,
    theta_fit,
)


class TestKlPareto:
    def test_identity_is_zero(self):
        assert kl_pareto(1.0, 1.0) == 0.0
        assert kl_pareto(3.7, 3.7) == 0.0

    def test_ratio_two(self):
        assert kl_pareto(2.0, 1.0) == pytest.approx(1.0 - math.log(2.0), abs=1e-15)

    def test_ratio_half(self):
        assert kl_pareto(0.5, 1.0) == pytest.approx(-0.5 - math.log(0.5), abs=1e-15)

    def test_zero_index_is_infinite(self):
        assert kl_pareto(0.0, 1.0) == math.inf
        assert kl_pareto(1.0, 0.0) == math.inf
        assert kl_pareto(0.0, 0.0) == math.inf

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            kl_pareto(-1.0, 1.0)
        with pytest.raises(ValueError):
            kl_pareto(1.0, -0.5)

    def test_depends_on_ratio_only(self, rng):
        """Scaling both indices leaves the divergence unchanged."""
        for _ in range(200):
            t1, t2 = np.exp(rng.normal(0, 1, 2))
            for c in (0.5, 2.0, 1024.0, 2.0**-20):
                assert kl_pareto(c * t1, c * t2) == pytest.approx(
                    kl_pareto(t1, t2), rel=1e-12
                )
            c = float(np.exp(rng.normal()))
            assert kl_pareto(c * t1, c * t2) == pytest.approx(
                kl_pareto(t1, t2), rel=1e-12
            )

    def test_series_matches_high_precision(self):
        """The small-argument branch agrees with 50-digit arithmetic."""
        getcontext().prec = 50
        for x in (1e-5, -1e-5, 3e-7, -4.2e-6, 1e-10):
            ref = Decimal(x) - (Decimal(1) + Decimal(x)).ln()
            assert g_pareto(x) == pytest.approx(float(ref), rel=1e-12)

    def test_vectorized_matches_scalar(self, rng):
        xs = rng.uniform(-0.9, 5.0, 100)
        vec = g_pareto(xs)
        for x, v in zip(xs, vec):
            assert v == g_pareto(float(x))


class TestLemmaBounds:
    """Two-sided comparison between the divergence and squared log-ratio."""

    def test_lower_bound_small_divergence(self, rng):
        for _ in range(2000):
            t1, t2 = np.exp(rng.normal(0, 0.5, 2))
            k = kl_pareto(t1, t2)
            if k <= 0.5:
                assert math.log(t1 / t2) ** 2 / 3.0 <= k + 1e-15

    def test_upper_bound_small_log_ratio(self, rng):
        for _ in range(2000):
            t1, t2 = np.exp(rng.normal(0, 0.4, 2))
            r2 = math.log(t1 / t2) ** 2
            if r2 <= 2.0 / 3.0:
                assert kl_pareto(t1, t2) <= 0.75 * r2 + 1e-15

    def test_quasi_symmetry(self, rng):
        for _ in range(2000):
            t1, t2 = np.exp(rng.normal(0, 0.5, 2))
            k12 = kl_pareto(t1, t2)
            if k12 <= 0.5:
                assert k12 <= 2.25 * kl_pareto(t2, t1) + 1e-15

    def test_chain_bound(self, rng):
        """Root-divergences along a chain control the end-to-end divergence."""
        checked = 0
        while checked < 300:
            m = int(rng.integers(2, 8))
            thetas = np.exp(np.cumsum(rng.normal(0, 0.02, m)) + 1.0)
            roots = [
                math.sqrt(kl_pareto(thetas[i], thetas[i + 1])) for i in range(m - 1)
            ]
            if sum(roots) > 1.0 / 3.0:
                continue
            checked += 1
            assert math.sqrt(kl_pareto(thetas[0], thetas[-1])) <= 1.5 * sum(roots) + 1e-12


class TestRhoStar:
    def test_identity(self):
        assert rho_star(1.0, 1.0) == 0.0

    def test_examples(self):
        assert rho_star(2.0, 1.0) == pytest.approx(math.log(2.0), abs=1e-15)
        assert rho_star(0.5, 2.0) == pytest.approx(1.5, abs=1e-15)

    def test_symmetric_and_positive(self, rng):
        for _ in range(500):
            x, y = np.exp(rng.normal(0, 1, 2))
            assert rho_star(x, y) == rho_star(y, x)
            if x != y:
                assert rho_star(x, y) > 0.0

    def test_non_positive_rejected(self):
        with pytest.raises(ValueError):
            rho_star(0.0, 1.0)
        with pytest.raises(ValueError):
            rho_star(1.0, -2.0)


def chi2_pareto_closed(theta1: float, theta2: float) -> float:
    """Chi-squared divergence between Pareto laws, by direct integration.

    The integrand (f1/f2)^2 f2 is a pure power of x, so the tail integral
    evaluates to theta2^2 / (theta1 * (2*theta2 - theta1)); it diverges
    unless theta1 < 2*theta2.
    """
    if theta1 >= 2.0 * theta2:
        return math.inf
    return (theta2 - theta1) ** 2 / (theta1 * (2.0 * theta2 - theta1))


class TestExcessDivergences:
    def test_kl_of_pareto_excess_is_zero(self):
        assert kl_excess_vs_pareto(Pareto(1.0), 5.0, 1.0) == pytest.approx(0.0, abs=1e-8)

    def test_chi2_of_pareto_excess_is_zero(self):
        assert chi2_excess_vs_pareto(Pareto(2.0), 3.0, 2.0) == pytest.approx(0.0, abs=1e-8)

    def test_chi2_matches_closed_form(self):
        for theta in (1.2, 1.5, 1.9):
            got = chi2_excess_vs_pareto(Pareto(1.0), 4.0, theta)
            assert got == pytest.approx(chi2_pareto_closed(1.0, theta), rel=1e-7)

    def test_chi2_divergent_reports_infinity(self):
        assert chi2_excess_vs_pareto(Pareto(1.0), 3.0, 0.4) == math.inf
        assert chi2_excess_vs_pareto(Pareto(1.0), 3.0, 0.5) == math.inf

    def test_kl_minimized_at_fitted_index(self):
        """Grid scan around the fitted index never beats the fitted index."""
        law = GPD()
        t = 10.0
        fit = theta_fit(law, t, method="quadrature")
        base = kl_excess_vs_pareto(law, t, fit)
        for factor in np.linspace(0.85, 1.15, 13):
            assert kl_excess_vs_pareto(law, t, float(fit * factor)) >= base - 1e-8

    def test_kl_decreasing_in_threshold_for_log_perturbation(self):
        law = LogPerturbedPareto(beta=1.0)
        values = [
            kl_excess_vs_pareto(law, t, 1.0)
            for t in (math.e**2, math.e**4, math.e**8)
        ]
        assert all(v > 0.0 for v in values)
        assert values[0] > values[1] > values[2]

    def test_jensen_sandwich(self):
        cases = [
            (Hall(), 20.0, None),
            (GPD(), 5.0, 1.3),
            (LogPerturbedPareto(), math.e**2, 1.1),
        ]
        for law, t, theta in cases:
            theta = theta if theta is not None else theta_fit(law, t)
            kl = kl_excess_vs_pareto(law, t, theta)
            chi2 = chi2_excess_vs_pareto(law, t, theta)
            assert 0.0 <= kl <= math.log1p(chi2) + 2e-8

    def test_chi2_bounded_by_rho_envelope(self):
        """The excess chi-squared obeys the rho-envelope bound.

        With eps0 the sup of the rho distance between alpha and the fitted
        index over the tail and eps1 the weighted second-log-moment of the
        excess law, chi-squared is at most eps1 * exp(eps0) * eps0^2.
        """
        from scipy import integrate

        law = LogPerturbedPareto(beta=1.0)
        for t in (math.e**2, math.e**3):
            fit = law.theta_tail(t)
            xs = np.geomspace(t, t * 1e12, 4001)
            eps0 = max(rho_star(float(law.alpha(x)), fit) for x in xs)
            sf_t = float(law.sf(t))

            def weight(x):
                return (1.0 + math.log(x)) ** 2 * x**eps0 * math.exp(
                    float(law.logpdf(t * x))
                ) * t / sf_t

            eps1 = integrate.quad(weight, 1.0, np.inf, limit=200)[0]
            chi2 = chi2_excess_vs_pareto(law, t, fit)
            assert chi2 <= eps1 * math.exp(eps0) * eps0**2

    def test_bad_threshold_rejected(self):
        with pytest.raises(ValueError):
            kl_excess_vs_pareto(Pareto(1.0), 0.5, 1.0)
        with pytest.raises(ValueError):
            kl_excess_vs_pareto(Pareto(1.0), 5.0, -1.0)
