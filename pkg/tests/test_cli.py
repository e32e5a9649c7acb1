import json
import subprocess
import sys

import pytest

from rounderr.cli import main
from rounderr.experiments import ExperimentConfig, mc_mse, zf_ls_pipeline
from rounderr.moments import kernel_predictions


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCli:
    def test_predict_is_library_call(self, capsys):
        code, out, _ = run(["predict", "--kernel", "dot", "--n", "1000", "--format", "fp32",
                            "--dist-x", "uniform:0,1", "--dist-y", "uniform:0,1"], capsys)
        assert code == 0
        lib = kernel_predictions("dot", 1000, 2.0**-24, dist_x="uniform:0,1", dist_y="uniform:0,1")[0]
        assert json.loads(out) == json.loads(json.dumps(lib))

    def test_simulate_is_library_call(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        code, _, _ = run(["simulate", "--kernel", "lu", "--n", "4", "--m", "30", "--trials", "200", "--seed", "1",
                          "--out", str(out)], capsys)
        assert code == 0
        cfg = ExperimentConfig(kernel="lu", n_grid=[4], m_grid=[30], trials=200, seed=1)
        assert out.read_text() == mc_mse(cfg).to_csv()

    def test_simulate_byte_identical(self, tmp_path, capsys):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            run(["simulate", "--n", "10,20", "--trials", "150", "--seed", "4", "--out", str(p)], capsys)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_config_overrides_flags(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"n": "15", "trials": 120, "seed": 9}))
        code, out, _ = run(["simulate", "--n", "99", "--config", str(cfg), "--out", "-"], capsys)
        assert code == 0
        assert ",15," in out.splitlines()[3] and "# seed: 9" in out

    def test_pipeline_is_library_call(self, tmp_path, capsys):
        out = tmp_path / "p.csv"
        run(["pipeline", "--m", "20", "--n", "3", "--trials", "100", "--out", str(out)], capsys)
        assert out.read_text() == zf_ls_pipeline(20, 3, "fp32", trials=100).to_csv()

    def test_precondition_message(self, capsys):
        code, _, err = run(["simulate", "--kernel", "lu", "--n", "5", "--m", "8", "--trials", "100"], capsys)
        assert code != 0 and "m must exceed n+3 for LU" in err

    def test_validate_model_writes_histogram(self, tmp_path, capsys):
        out = tmp_path / "v.csv"
        code, _, _ = run(["validate-model", "--format", "bfloat16", "--n", "2000", "--stride", "10",
                          "--trials", "20", "--out", str(out)], capsys)
        assert code == 0
        hist = (tmp_path / "v.hist.csv").read_text().splitlines()
        assert hist[2] == "window,bin_left,bin_right,empirical_density,analytic_density"

    def test_formats_and_bounds(self, capsys):
        code, out, _ = run(["formats"], capsys)
        assert {f["name"] for f in json.loads(out)} >= {"bfloat16", "fp16", "fp32", "fp64"}
        code, out, _ = run(["compare-bounds", "--n", "10", "--trials", "100", "--out", "-"], capsys)
        assert code == 0 and "corollary" in out.splitlines()[2]

    @pytest.mark.parametrize("sub", ["predict", "simulate", "compare-bounds", "figures", "validate-model",
                                     "pipeline", "formats"])
    def test_help(self, sub):
        res = subprocess.run([sys.executable, "-m", "rounderr", sub, "--help"], capture_output=True, text=True)
        assert res.returncode == 0
        assert "default" in res.stdout or sub == "figures"
