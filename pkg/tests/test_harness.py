import math

import numpy as np
import pytest

from paretotail import (
    GPD,
    Pareto,
    gamma_rmse_experiment,
    quantile_ratio_experiment,
    relmse,
    sample_quantile_comparison,
    write_report,
)
from paretotail.adaptive import default_config


class TestRelmse:
    def test_exact_estimates_give_zero(self):
        assert relmse([5.0, 5.0, 5.0], 5.0) == 0.0

    def test_symmetric_log_errors(self):
        q = 3.7
        assert relmse([math.e * q, q / math.e], q) == pytest.approx(1.0, rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            relmse([], 1.0)

    def test_non_positive_truth_rejected(self):
        with pytest.raises(ValueError):
            relmse([1.0], 0.0)

    def test_non_positive_estimates_excluded_with_warning(self):
        with pytest.warns(UserWarning, match="excluded 1"):
            value = relmse([2.0, 0.0, 0.5], 1.0)
        assert value == pytest.approx(math.log(2.0), rel=1e-12)


SMALL = dict(n=200, n_rep=30, seed=3)


@pytest.fixture(scope="module")
def tiny_table1():
    return quantile_ratio_experiment(
        GPD(), n=SMALL["n"], n_rep=SMALL["n_rep"], p_grid=(0.9, 0.99, 0.9999),
        config=default_config(SMALL["n"]), seed=SMALL["seed"], workers=1,
    )


class TestQuantileRatio:
    def test_parallel_runs_bit_identical(self, tiny_table1):
        again = quantile_ratio_experiment(
            GPD(), n=SMALL["n"], n_rep=SMALL["n_rep"], p_grid=(0.9, 0.99, 0.9999),
            config=default_config(SMALL["n"]), seed=SMALL["seed"], workers=2,
        )
        for name, table in tiny_table1.tables.items():
            assert np.array_equal(table.values, again.tables[name].values), name

    def test_ratio_recomputable_from_stored_curves(self, tiny_table1):
        """The headline ratio must follow from the stored per-k curves."""
        ratio_tbl = tiny_table1.tables["ratio"]
        perk = tiny_table1.tables["sigma_fixed"]
        sigma_fixed = perk.values[:, 1:]
        min_fix = sigma_fixed.min(axis=0)
        expected = ratio_tbl.column("sigma_adaptive") / min_fix
        np.testing.assert_allclose(ratio_tbl.column("ratio"), expected, rtol=1e-12)
        np.testing.assert_allclose(ratio_tbl.column("min_sigma_fixed"), min_fix, rtol=1e-12)

    def test_truth_column_matches_law(self, tiny_table1):
        law = GPD()
        for p, q in zip(tiny_table1.tables["ratio"].column("p"),
                        tiny_table1.tables["ratio"].column("q_true")):
            assert q == pytest.approx(float(law.ppf(p)), rel=1e-10)

    def test_single_repetition_defined(self):
        report = quantile_ratio_experiment(
            Pareto(1.0), n=150, n_rep=1, p_grid=(0.99,),
            config=default_config(150), seed=9, workers=1,
        )
        assert np.isfinite(report.tables["ratio"].column("ratio")).all()

    def test_manifest_round_trip(self, tiny_table1, tmp_path):
        paths = write_report(tiny_table1, tmp_path)
        names = {p.name for p in paths}
        assert f"gpd_{SMALL['n']}_table1.csv" in names
        assert f"gpd_{SMALL['n']}_table1_manifest.json" in names
        csv = (tmp_path / f"gpd_{SMALL['n']}_table1.csv").read_text()
        header = csv.splitlines()[0].split(",")
        assert header == ["p", "q_true", "sigma_adaptive", "min_sigma_fixed",
                          "argmin_k", "ratio", "excluded"]


class TestSampleQuantileComparison:
    def test_far_k_ratio_near_one(self):
        """Deep below the selected tail the two estimators coincide."""
        report = sample_quantile_comparison(
            GPD(), n=400, n_rep=40, k_grid=np.array([1, 10, 100, 399]),
            config=default_config(400), seed=5, workers=1,
        )
        tbl = report.tables["ratio0"]
        ratios = tbl.column("ratio0")
        assert ratios[0] > ratios[-1]
        assert ratios[-1] == pytest.approx(1.0, abs=0.08)

    def test_k_grid_validated(self):
        with pytest.raises(ValueError):
            sample_quantile_comparison(GPD(), n=100, n_rep=5,
                                       k_grid=np.array([0, 5]), seed=1)


class TestGammaRmse:
    def test_hill_spread_shrinks_like_root_k_on_pareto(self):
        """On exact Pareto data the Hill RMSE decays like 1/sqrt(k)."""
        report = gamma_rmse_experiment(
            Pareto(1.0), n=500, n_rep=60, config=default_config(500), seed=7, workers=1,
        )
        curve = report.tables["rmse_hill"]
        ks = curve.column("k")
        sig = curve.column("sigma_hill")
        sel = (ks >= 10) & (ks <= 300)
        slope = np.polyfit(np.log(ks[sel]), np.log(sig[sel]), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.15)

    def test_requires_positive_target_index(self):
        with pytest.raises(ValueError):
            gamma_rmse_experiment(Pareto(1.0), gamma=-1.0, n=100, n_rep=5, seed=1)

    def test_summary_consistent_with_curve(self):
        report = gamma_rmse_experiment(
            GPD(), n=200, n_rep=25, config=default_config(200), seed=13, workers=1,
        )
        summary = report.tables["summary"]
        curve = report.tables["rmse_hill"]
        k_best = int(summary.cell("value", "argmin_k"))
        assert summary.cell("value", "min_sigma_hill") == pytest.approx(
            float(curve.values[k_best - 1, 1]), rel=1e-12
        )
        assert summary.cell("value", "ratio") == pytest.approx(
            summary.cell("value", "sigma_adaptive")
            / summary.cell("value", "min_sigma_hill"),
            rel=1e-12,
        )
