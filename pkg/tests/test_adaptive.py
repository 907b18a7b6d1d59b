import numpy as np
import pytest

from paretotail import (
    AdaptiveConfig,
    ConfigError,
    Pareto,
    ParetoChangePoint,
    Sample,
    build_grid,
    draw_sample,
    hill,
    nearest_feasible_k0,
    select,
)
from paretotail.adaptive import default_config, full_grid, validate_feasibility


class TestGrid:
    def test_even_grid(self):
        r = build_grid(1000, 200)
        assert np.array_equal(r, 5 * np.arange(1, 201))

    def test_full_grid_is_identity(self):
        assert np.array_equal(build_grid(1000, 1000), np.arange(1, 1001))

    def test_small_grid_by_hand(self):
        assert list(build_grid(7, 3)) == [2, 4, 7]

    def test_last_point_is_n(self):
        for n, K in ((17, 5), (1000, 200), (323, 100)):
            assert build_grid(n, K)[-1] == n

    def test_strictly_increasing_when_valid(self):
        for n, K in ((17, 5), (50, 50), (1000, 137)):
            assert np.all(np.diff(build_grid(n, K)) > 0)

    def test_rejects_bad_lengths(self):
        with pytest.raises(ConfigError):
            build_grid(10, 11)
        with pytest.raises(ConfigError):
            build_grid(10, 0)


class TestConfig:
    def test_window_fraction_ranges(self):
        with pytest.raises(ConfigError):
            AdaptiveConfig(rho=0.4)
        with pytest.raises(ConfigError):
            AdaptiveConfig(delta=0.0)

    def test_exactly_one_critical_value(self):
        with pytest.raises(ConfigError):
            AdaptiveConfig(z=None, mu=None)
        with pytest.raises(ConfigError):
            AdaptiveConfig(z=10.0, mu=1.0)

    def test_mu_policy_scales_with_log_n(self):
        cfg = AdaptiveConfig(z=None, mu=2.0)
        assert cfg.critical_value(1000) == pytest.approx(2.0 * np.log(1000))

    def test_feasibility_names_the_violated_condition(self):
        with pytest.raises(ConfigError, match=r"\(1-delta\)"):
            validate_feasibility(1000, AdaptiveConfig(k0=10))
        with pytest.raises(ConfigError, match="rho"):
            validate_feasibility(
                40, AdaptiveConfig(rho=0.2, delta=1.0 / 3.0, k0=4, K_n=40)
            )

    def test_nearest_feasible_start(self):
        assert nearest_feasible_k0(1000) == 20
        assert nearest_feasible_k0(200) == 20
        cfg = default_config(500)
        validate_feasibility(500, cfg)

    def test_default_config_caps_grid(self):
        assert default_config(150).K_n == 150


class TestSelect:
    def test_pareto_usually_accepts_whole_sample(self):
        accepted = 0
        for i in range(50):
            rng = np.random.default_rng((101, i))
            s = draw_sample(Pareto(1.0), 1000, rng)
            sel = select(s, default_config(1000))
            if not sel.rejected:
                accepted += 1
                assert sel.k_hat == s.n
                assert sel.tau_hat == s.order_stat(s.n)
                assert sel.theta_hat == pytest.approx(hill(s, s.n - 1))
        assert accepted >= 45

    def test_change_point_detected_near_true_rank(self):
        law = ParetoChangePoint(theta1=3.0, theta2=1.0, tau=1000.0)
        k_hats = []
        for i in range(100):
            rng = np.random.default_rng((102, i))
            sel = select(draw_sample(law, 1000, rng), default_config(1000))
            assert sel.rejected
            assert np.ceil(0.25 * sel.m_hat) <= sel.k_hat <= np.floor(0.95 * sel.m_hat)
            k_hats.append(sel.k_hat)
        assert 70 <= np.median(k_hats) <= 130

    def test_infeasible_start_is_an_error(self):
        s = Sample(np.exp(np.random.default_rng(0).normal(0, 1, 10)))
        with pytest.raises(ConfigError):
            select(s, AdaptiveConfig(k0=50, K_n=10))

    def test_power_transform_stability(self):
        """Selection indices are unchanged and the index estimate scales."""
        cfg = default_config(800)
        for i in range(20):
            rng = np.random.default_rng((103, i))
            s = draw_sample(Pareto(1.0), 800, rng)
            sel = select(s, cfg)
            for c in (0.5, 3.0):
                sel_c = select(Sample(s.values**c), cfg)
                assert (sel_c.m_hat, sel_c.k_hat, sel_c.rejected) == (
                    sel.m_hat, sel.k_hat, sel.rejected,
                )
                assert sel_c.theta_hat == pytest.approx(c * sel.theta_hat, rel=1e-10)

    def test_monotone_in_critical_value(self):
        """Raising the critical value never triggers an earlier rejection."""
        law = ParetoChangePoint(theta1=2.5, theta2=1.0, tau=300.0)
        for i in range(15):
            rng = np.random.default_rng((104, i))
            s = draw_sample(law, 600, rng)
            m_prev = None
            for z in (5.0, 10.0, 20.0, 40.0):
                sel = select(s, default_config(600, z=z))
                if m_prev is not None:
                    assert sel.m_hat >= m_prev
                m_prev = sel.m_hat

    def test_deterministic_and_traced(self):
        rng = np.random.default_rng(105)
        s = draw_sample(Pareto(1.0), 500, rng)
        cfg = default_config(500)
        a = select(s, cfg)
        b = select(s, cfg)
        assert a.trace == b.trace
        assert (a.m_hat, a.k_hat, a.tau_hat, a.theta_hat, a.rejected) == (
            b.m_hat, b.k_hat, b.tau_hat, b.theta_hat, b.rejected,
        )
        ms = [m for m, _ in a.trace]
        grid = full_grid(500, cfg.K_n)
        assert ms == [int(v) for v in grid[cfg.k0 - 1:][:len(ms)]]

    def test_trace_can_be_disabled(self):
        rng = np.random.default_rng(106)
        s = draw_sample(Pareto(1.0), 300, rng)
        assert select(s, default_config(300), trace=False).trace == []
