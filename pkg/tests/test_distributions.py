import math

import numpy as np
import pytest
from scipy import integrate, stats

from paretotail import (
    ExcessLaw,
    GPD,
    Hall,
    LogGamma,
    LogPerturbedPareto,
    Pareto,
    ParetoChangePoint,
    PositiveCauchy,
    Sample,
    alpha_F,
    decomposition_check,
    draw_sample,
    kl_excess_vs_pareto,
    law_names,
    make_law,
    theta_fit,
    theta_fit_empirical,
)

ALL_LAWS = [
    Pareto(1.0),
    Pareto(2.3),
    ParetoChangePoint(3.0, 1.0, 1000.0),
    PositiveCauchy(),
    LogGamma(),
    LogPerturbedPareto(),
    Hall(),
    GPD(),
]


def law_id(law):
    return repr(law)


class TestRegistry:
    def test_known_names(self):
        assert set(law_names()) == {
            "pareto", "pareto-changepoint", "cauchy", "loggamma",
            "logpareto", "hall", "gpd",
        }

    def test_unknown_rejected(self):
        with pytest.raises(ValueError, match="unknown law"):
            make_law("weibull")

    def test_params_forwarded(self):
        law = make_law("pareto", theta=2.0)
        assert law.ppf(0.75) == pytest.approx(16.0)

    def test_bad_params_rejected(self):
        with pytest.raises(ValueError):
            make_law("pareto", theta=-1.0)
        with pytest.raises(TypeError):
            make_law("gpd", nope=1.0)


class TestLawBasics:
    @pytest.mark.parametrize("law", ALL_LAWS, ids=law_id)
    def test_cdf_sf_complementary(self, law):
        for q in (0.05, 0.3, 0.9, 0.999):
            x = float(law.ppf(q))
            assert float(law.cdf(x)) + float(law.sf(x)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("law", ALL_LAWS, ids=law_id)
    def test_quantile_round_trip(self, law):
        """ppf(cdf(x)) recovers x on a log-spaced grid over the support."""
        lo = float(law.ppf(0.01))
        hi = float(law.ppf(1.0 - 1e-6))
        lo = max(lo, law.support_left + 1e-9 * max(1.0, law.support_left))
        for x in np.geomspace(max(lo, 1e-6), hi, 40):
            u = float(law.cdf(x))
            if not 0.0 < u < 1.0 - 1e-12:
                continue
            assert float(law.ppf(u)) == pytest.approx(x, rel=1e-9)

    @pytest.mark.parametrize("law", ALL_LAWS, ids=law_id)
    def test_isf_matches_deep_tail(self, law):
        for s in (1e-3, 1e-6, 1e-10):
            x = float(law.isf(s))
            assert float(law.sf(x)) == pytest.approx(s, rel=1e-8)

    @pytest.mark.parametrize("law", ALL_LAWS, ids=law_id)
    def test_pdf_is_cdf_derivative(self, law):
        for q in (0.2, 0.6, 0.95):
            x = float(law.ppf(q))
            h = 1e-6 * max(x, 1.0)
            numeric = (float(law.cdf(x + h)) - float(law.cdf(x - h))) / (2.0 * h)
            assert float(law.pdf(x)) == pytest.approx(numeric, rel=5e-5, abs=1e-12)

    @pytest.mark.parametrize("law", ALL_LAWS, ids=law_id)
    def test_sampler_ks(self, law):
        rng = np.random.default_rng(2718)
        x = law.sample(100_000, rng)
        result = stats.kstest(x, lambda v: np.asarray(law.cdf(v)))
        assert result.pvalue > 0.01

    def test_sampling_deterministic(self):
        law = Hall()
        a = law.sample(100, np.random.default_rng(7))
        b = law.sample(100, np.random.default_rng(7))
        assert np.array_equal(a, b)

    def test_draw_sample_wraps(self):
        s = draw_sample(GPD(), 50, np.random.default_rng(1))
        assert isinstance(s, Sample) and s.n == 50


class TestAlpha:
    def test_pareto_constant(self):
        assert alpha_F(Pareto(2.0), 5.0) == 2.0
        assert alpha_F(Pareto(2.0), 500.0) == 2.0

    def test_log_perturbed_closed_form(self):
        law = LogPerturbedPareto(beta=1.0)
        assert alpha_F(law, math.e**2) == pytest.approx(2.0, rel=1e-12)

    def test_gpd_form(self):
        law = GPD()
        for x in (0.5, 3.0, 100.0):
            assert alpha_F(law, x) == pytest.approx((1.0 + x) / x, rel=1e-10)

    def test_loggamma_form(self):
        law = LogGamma()
        for x in (math.e, math.e**2, 50.0):
            assert alpha_F(law, x) == pytest.approx(1.0 + 1.0 / math.log(x), rel=1e-9)

    def test_changepoint_piecewise(self):
        law = ParetoChangePoint(3.0, 1.0, 100.0)
        assert alpha_F(law, 50.0) == 3.0
        assert alpha_F(law, 200.0) == 1.0

    @pytest.mark.parametrize("law", ALL_LAWS, ids=law_id)
    def test_matches_hazard_definition(self, law):
        for q in (0.3, 0.8, 0.99):
            x = float(law.ppf(q))
            if x <= law.support_left:
                continue
            direct = float(law.sf(x)) / (x * float(law.pdf(x)))
            assert float(law.alpha(x)) == pytest.approx(direct, rel=1e-9)

    def test_outside_support_rejected(self):
        with pytest.raises(ValueError):
            alpha_F(Pareto(1.0), 0.5)


class TestThetaFit:
    def test_pareto_is_fixed_point(self):
        assert theta_fit(Pareto(1.7), 4.0, method="quadrature") == pytest.approx(
            1.7, abs=1e-8
        )
        assert theta_fit(Pareto(1.7), 4.0) == 1.7

    def test_log_perturbed_closed_form(self):
        law = LogPerturbedPareto(beta=1.0)
        assert law.theta_tail(math.e**2) == pytest.approx(1.5, abs=1e-14)
        assert theta_fit(law, math.e**2, method="quadrature") == pytest.approx(
            1.5, abs=1e-7
        )

    def test_hall_ratio_form_vs_quadrature(self):
        law = Hall()
        t = 50.0
        tb, tg = 2.0 * t**-1.0, -1.0 * t**-2.5
        closed = (1.0 * tb + 0.4 * tg) / (tb + tg)
        assert law.theta_tail(t) == pytest.approx(closed, rel=1e-12)
        assert theta_fit(law, t, method="quadrature") == pytest.approx(closed, abs=1e-6)

    def test_gpd_against_hand_integral(self):
        """Direct integration gives (1+t) * log(1 + 1/t) for the unit GPD."""
        for t in (5.0, 10.0):
            expected = (1.0 + t) * math.log1p(1.0 / t)
            assert theta_fit(GPD(), t, method="quadrature") == pytest.approx(
                expected, abs=1e-8
            )

    def test_changepoint_mixture_form(self):
        law = ParetoChangePoint(3.0, 1.0, 100.0)
        t = 20.0
        expected = 3.0 + (1.0 - 3.0) * float(law.sf(100.0)) / float(law.sf(t))
        assert law.theta_tail(t) == pytest.approx(expected, rel=1e-12)
        assert theta_fit(law, t, method="quadrature") == pytest.approx(expected, abs=1e-7)
        assert law.theta_tail(150.0) == 1.0

    @pytest.mark.parametrize(
        "law", [PositiveCauchy(), Hall(), GPD()], ids=law_id
    )
    def test_tends_to_regular_variation_index(self, law):
        v3 = theta_fit(law, 1e3)
        v6 = theta_fit(law, 1e6)
        assert abs(v6 - 1.0) < abs(v3 - 1.0)
        assert v6 == pytest.approx(1.0, abs=2e-3)

    @pytest.mark.parametrize("law", ALL_LAWS, ids=law_id)
    def test_mean_value_identity(self, law):
        """The fitted index equals the tail average of alpha under the law."""
        t = float(law.ppf(0.8))
        if t <= law.support_left:
            t = law.support_left * 1.5 + 0.5
        sf_t = float(law.sf(t))
        breaks = getattr(law, "density_breaks", lambda: ())()

        def integrand(x):
            return float(law.alpha(x)) * float(law.pdf(x)) / sf_t

        pieces = sorted([t] + [b for b in breaks if b > t])
        mean_alpha = sum(
            integrate.quad(integrand, a, b, limit=300)[0]
            for a, b in zip(pieces, pieces[1:])
        ) + integrate.quad(integrand, pieces[-1], np.inf, limit=300)[0]
        assert theta_fit(law, t) == pytest.approx(mean_alpha, abs=1e-6)

    def test_closed_form_requested_but_missing(self):
        with pytest.raises(ValueError, match="closed"):
            theta_fit(PositiveCauchy(), 10.0, method="closed")


class TestThetaFitEmpirical:
    def test_pareto_exact_for_any_sample(self):
        rng = np.random.default_rng(5)
        s = draw_sample(Pareto(1.3), 100, rng)
        for k in (1, 10, 99):
            assert theta_fit_empirical(s, k, Pareto(1.3)) == pytest.approx(1.3)

    def test_gpd_hand_average(self):
        s = Sample([1.0, 2.0, 4.0])
        expected = ((1.0 + 4.0) / 4.0 + (1.0 + 2.0) / 2.0) / 2.0
        assert theta_fit_empirical(s, 2, GPD()) == pytest.approx(expected, rel=1e-12)

    def test_tracks_fitted_index_for_loggamma(self):
        """The plug-in average sits near the fitted index at the same depth."""
        rng = np.random.default_rng(6)
        law = LogGamma()
        s = draw_sample(law, 1000, rng)
        k = 100
        approx = theta_fit_empirical(s, k, law)
        target = theta_fit(law, s.order_stat(k + 1))
        assert approx == pytest.approx(target, rel=0.15)

    def test_support_violation_rejected(self):
        s = Sample([1.5, 2.0, 8.0])
        with pytest.raises(ValueError):
            theta_fit_empirical(s, 3, LogPerturbedPareto())


class TestDecomposition:
    def test_at_fitted_index_third_term_vanishes(self):
        law = GPD()
        t = 5.0
        fit = theta_fit(law, t)
        first, second, third = decomposition_check(law, t, fit)
        assert third == 0.0
        assert first == pytest.approx(second, abs=2e-9)

    def test_pareto_excess_second_term_vanishes(self):
        first, second, third = decomposition_check(Pareto(1.5), 7.0, 2.0)
        assert second == pytest.approx(0.0, abs=1e-9)
        assert first == pytest.approx(third, abs=2e-9)

    def test_identity_for_gpd(self):
        first, second, third = decomposition_check(GPD(), 5.0, 1.3)
        assert first == pytest.approx(second + third, abs=2e-9)


class TestLawValidation:
    def test_hall_support_start_solves_unit_survival(self):
        law = Hall()
        # Independent bisection on 2/x - x**-2.5 = 1 over the decreasing branch.
        lo, hi = 1.25 ** (2.0 / 3.0), 10.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if 2.0 / mid - mid**-2.5 > 1.0:
                lo = mid
            else:
                hi = mid
        assert law.x0 == pytest.approx(0.5 * (lo + hi), abs=1e-10)
        assert float(law.sf(law.x0)) == pytest.approx(1.0, abs=1e-12)

    def test_hall_rejects_decreasing_cdf(self):
        with pytest.raises(ValueError):
            Hall(beta=1.0, gamma=0.9, c_beta=1.0, c_gamma=-5.0)

    def test_log_perturbed_needs_room_for_density(self):
        with pytest.raises(ValueError, match="exp\\(beta\\)"):
            LogPerturbedPareto(beta=2.0, x0=math.e)

    def test_excess_law_matches_conditional_form(self):
        base = GPD()
        t = 3.0
        excess = ExcessLaw(base, t)
        for x in (1.5, 4.0, 20.0):
            expected = 1.0 - float(base.sf(t * x)) / float(base.sf(t))
            assert float(excess.cdf(x)) == pytest.approx(expected, rel=1e-12)

    def test_excess_of_pareto_is_pareto(self):
        excess = ExcessLaw(Pareto(1.4), 11.0)
        ref = Pareto(1.4)
        for x in (1.2, 3.0, 50.0):
            assert float(excess.sf(x)) == pytest.approx(float(ref.sf(x)), rel=1e-12)

    def test_kl_via_excess_against_module(self):
        law = LogGamma()
        t = 10.0
        assert kl_excess_vs_pareto(law, t, 1.2) >= 0.0
