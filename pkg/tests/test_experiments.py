import json

import numpy as np
import pytest

from rounderr.experiments import (ExperimentConfig, corollary_coverage, mc_mse, model_validity_probe,
                                  reproduce_figure, zf_ls_pipeline)


def small(**kw):
    base = dict(trials=300, block=100, seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    @pytest.mark.parametrize("kw, msg", [
        (dict(trials=50), "trials"),
        (dict(kernel="qr"), "kernel"),
        (dict(kernel="lu", n_grid=[5], m_grid=[8]), "n\\+3"),
        (dict(kernel="trisolve", n_grid=[5], m_grid=[6]), "n\\+1"),
        (dict(format="fp8"), "format"),
    ])
    def test_preconditions(self, kw, msg):
        with pytest.raises(ValueError, match=msg):
            small(**kw).validate()

    def test_from_dict(self):
        c = ExperimentConfig.from_dict({"kernel": "matmul", "n_grid": "10,20", "p": [3]})
        assert c.n_grid == [10, 20] and c.p_grid == [3]
        with pytest.raises(ValueError):
            ExperimentConfig.from_dict({"bogus": 1})


class TestMse:
    def test_csv_header_and_determinism(self):
        a = mc_mse(small(n_grid=[10, 50])).to_csv()
        b = mc_mse(small(n_grid=[10, 50])).to_csv()
        assert a == b
        lines = a.splitlines()
        assert lines[0].startswith("# config: ") and json.loads(lines[0][10:])["seed"] == 3
        assert lines[1] == "# seed: 3"

    def test_workers_do_not_change_result(self):
        a = mc_mse(small(kernel="matvec", n_grid=[20], m_grid=[3]))
        b = mc_mse(small(kernel="matvec", n_grid=[20], m_grid=[3], workers=2))
        assert a.to_csv().splitlines()[2:] == b.to_csv().splitlines()[2:]

    def test_seed_changes_result(self):
        assert mc_mse(small(seed=1)).rows[0]["mse_sim"] != mc_mse(small(seed=2)).rows[0]["mse_sim"]

    def test_carrier_has_zero_error(self):
        r = mc_mse(small(format="fp64", kernel="lu", n_grid=[4], m_grid=[20]))
        assert all(row["mse_sim"] == 0 for row in r.rows)

    def test_pooled_statistics(self):
        # low precision makes the ratio well resolved with few trials
        r = mc_mse(small(format="bfloat16", dist_x="gaussian:0,1", dist_y="gaussian:0,1", n_grid=[30], trials=2000))
        row = r.rows[0]
        assert row["ratio"] == pytest.approx(1.0, abs=0.25)
        assert row["se_mse"] < 0.1 * row["mse_sim"]
        assert abs(row["var_sim"] - row["mse_sim"]) < 3 * row["se_mse"]

    def test_matmul_rowsum(self):
        r = mc_mse(small(kernel="matmul", n_grid=[10], m_grid=[3], p_grid=[4], format="bfloat16"))
        row = {x["element"]: x for x in r.rows}
        assert row["R22"]["analytic"] == pytest.approx(4 * row["C"]["analytic"])

    def test_bounds_columns(self):
        r = mc_mse(small(bounds=True, n_grid=[100]))
        assert r.rows[0]["db1"] > r.rows[0]["mse_sim"]
        assert "pb3" in r.columns


class TestProbe:
    def test_independent_stays_near_model(self):
        p = model_validity_probe(20000, 1000, "bfloat16", 1, trials=400, dependent=False)
        assert np.all(np.abs(p.ratio - 1) < 0.5)

    def test_dependent_diverges(self):
        # bfloat16 stalls far sooner than fp32
        p = model_validity_probe(20000, 200, "bfloat16", 1, trials=200, dependent=True)
        assert p.late_ratio > 2
        lo, hi, emp, ana = p.hist_early
        assert emp.size == 64 and np.sum(emp * (hi - lo)) == pytest.approx(1.0)

    def test_windows_need_checkpoints(self):
        p = model_validity_probe(2000, 1000, "fp16", 1, trials=20)
        with pytest.raises(ValueError, match="no checkpoints"):
            p.early_ratio

    def test_bad_stride(self):
        with pytest.raises(ValueError):
            model_validity_probe(100, 1000)


class TestPipeline:
    def test_stages(self):
        r = zf_ls_pipeline(40, 4, "fp32", trials=300, block=100)
        stages = {row["stage"] for row in r.rows}
        assert stages == {"matmul", "matvec", "lu", "forward_solve", "back_solve"}
        row = r.where(element="A_offdiag")[0]
        assert row["ratio"] == pytest.approx(1.0, abs=0.3)

    def test_carrier_pipeline_is_exact(self):
        r = zf_ls_pipeline(20, 3, "fp64", trials=100, block=100)
        assert all(row["mse_sim"] == 0 for row in r.rows)

    def test_precondition(self):
        with pytest.raises(ValueError, match="n\\+3"):
            zf_ls_pipeline(6, 4)


class TestFigures:
    def test_small_figures(self):
        r = reproduce_figure(8, {"trials": 100, "n_grid": [5], "p_grid": [2], "m_grid": [3]})
        assert {row["panel"] for row in r.rows} == {"vs_n", "vs_p", "vs_m"}
        r2 = reproduce_figure(2, {"trials": 100, "n_grid": [10]})
        assert "db2" in r2.columns
        with pytest.raises(ValueError):
            reproduce_figure(4)

    def test_coverage(self):
        out = corollary_coverage(50, (0.5,), "fp16", trials=500, block=250)
        assert out[0]["violation_rate"] <= 0.5


class TestHarnessProperties:
    def test_se_shrinks_with_trials(self):
        se = [mc_mse(small(n_grid=[50], trials=t, format="bfloat16")).rows[0]["se_mse"] for t in (500, 1000, 2000, 4000)]
        ratios = np.array(se[:-1]) / np.array(se[1:])
        np.testing.assert_allclose(ratios, np.sqrt(2), rtol=0.15)

    def test_seed_independence(self):
        a = mc_mse(small(n_grid=[100], trials=4000, seed=11)).rows[0]
        b = mc_mse(small(n_grid=[100], trials=4000, seed=12)).rows[0]
        assert abs(a["mse_sim"] - b["mse_sim"]) <= 3 * np.hypot(a["se_mse"], b["se_mse"])

    def test_small_and_large_trial_counts_agree(self):
        a = mc_mse(small(n_grid=[1000], trials=100, seed=5)).rows[0]
        b = mc_mse(small(n_grid=[1000], trials=10000, seed=6)).rows[0]
        assert abs(a["mse_sim"] - b["mse_sim"]) <= 3 * np.hypot(a["se_mse"], b["se_mse"])

    @pytest.mark.parametrize("dist, slope", [("uniform:0,1", 3.0), ("uniform:-1,1", 2.0)])
    def test_simulated_slope(self, dist, slope):
        r = mc_mse(small(dist_x=dist, dist_y=dist, n_grid=[100, 300, 1000, 3000, 10000], trials=1000))
        n = np.array([row["n"] for row in r.rows])
        mse = np.array([row["mse_sim"] for row in r.rows])
        assert abs(np.polyfit(np.log(n), np.log(mse), 1)[0] - slope) <= 0.3

    def test_pipeline_reference_point(self):
        r = zf_ls_pipeline(200, 8, "fp32", trials=10000)
        assert r.where(element="A_offdiag")[0]["ratio"] == pytest.approx(1.0, abs=0.15)
        assert r.where(element="u33")[0]["ratio"] == pytest.approx(1.0, abs=0.20)
