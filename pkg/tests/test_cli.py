"""Command-line interface: commands, exit codes, provenance, idempotence."""

import json

import numpy as np
import pytest

import cyclosense as cs
from cyclosense import io
from cyclosense.cli import main


@pytest.fixture
def plan_path(tmp_path, mini_plan):
    path = tmp_path / "plan.json"
    io.write_plan_json(path, mini_plan)
    return path


def tree_bytes(root):
    return {p.name: p.read_bytes() for p in sorted(root.iterdir())}


class TestGen:
    def test_writes_signal_and_plan(self, tmp_path, plan_path):
        out = tmp_path / "g"
        assert main(["gen", "--plan", str(plan_path), "--out", str(out)]) == 0
        assert (out / "signal.f64").exists()
        assert (out / "signal.json").exists()
        assert (out / "plan.json").exists()
        buf = io.read_signal(out / "signal")
        assert len(buf) == 2048

    def test_idempotent(self, tmp_path, plan_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["gen", "--plan", str(plan_path), "--out", str(out_a)])
        main(["gen", "--plan", str(plan_path), "--out", str(out_b)])
        assert tree_bytes(out_a) == tree_bytes(out_b)


class TestScdCommand:
    def test_writes_matrix(self, tmp_path, plan_path):
        out = tmp_path / "s"
        assert main(["scd", "--plan", str(plan_path), "--out", str(out)]) == 0
        header = json.loads((out / "scd.json").read_text())
        assert header["shape"] == [1024, 1]
        payload = (out / "scd.c64").read_bytes()
        assert len(payload) == 1024 * 1 * 8


class TestCollect:
    def test_writes_profile_csv(self, tmp_path, plan_path, mini_plan):
        out = tmp_path / "c"
        assert main(["collect", "--plan", str(plan_path), "--out", str(out)]) == 0
        samples = io.read_profile_samples(out / "profile.csv")
        assert samples.size == mini_plan.noise_windows_l
        # CSV carries 9 significant digits of the in-memory values
        exact = cs.collect_noise_profile(mini_plan)
        np.testing.assert_allclose(samples, exact, rtol=1e-8)


class TestFit:
    def test_fit_outputs(self, tmp_path, plan_path):
        collect_dir, fit_dir = tmp_path / "c", tmp_path / "f"
        main(["collect", "--plan", str(plan_path), "--out", str(collect_dir)])
        code = main(["fit", "--samples", str(collect_dir / "profile.csv"),
                     "--out", str(fit_dir)])
        assert code == 0
        report = io.read_fit_json(fit_dir / "fit.json")
        assert report.converged
        assert (fit_dir / "histogram.csv").exists()

    def test_constant_samples_exit_numeric_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("alpha_hz,max_magnitude,window_index\n"
                       + "".join(f"2e6,0.5,{i}\n" for i in range(200)))
        code = main(["fit", "--samples", str(bad), "--out", str(tmp_path / "f")])
        assert code == 3
        assert "degenerate" in capsys.readouterr().err


class TestThreshold:
    def test_prints_gumbel_quantile(self, tmp_path, capsys):
        fit = cs.FitReport(cs.GevParams(0.0, 0.0, 1.0), -1.0, 5, True, 1000, 1e-9)
        io.write_fit_json(tmp_path / "fit.json", fit)
        code = main(["threshold", "--pf", "0.05", "--fit", str(tmp_path / "fit.json")])
        assert code == 0
        printed = float(capsys.readouterr().out.strip())
        assert printed == pytest.approx(2.9701952490421646, abs=1e-6)
        assert round(printed, 5) == 2.97020

    def test_missing_fit_file_is_io_error(self, tmp_path, capsys):
        code = main(["threshold", "--pf", "0.05", "--fit", str(tmp_path / "nope.json")])
        assert code == 4


class TestRoc:
    def test_emits_curves_fit_histogram_plan(self, tmp_path, plan_path, mini_plan):
        out = tmp_path / "r"
        assert main(["roc", "--plan", str(plan_path), "--out", str(out)]) == 0
        for snr in mini_plan.snr_db_list:
            assert (out / f"roc_{snr:g}.csv").exists()
        assert (out / "fit.json").exists()
        assert (out / "histogram.csv").exists()
        resolved = io.read_plan_json(out / "plan.json")
        assert resolved == mini_plan

    def test_byte_identical_across_runs_and_jobs(self, tmp_path, plan_path):
        out_a, out_b = tmp_path / "r1", tmp_path / "r2"
        main(["roc", "--plan", str(plan_path), "--out", str(out_a), "--jobs", "1"])
        main(["roc", "--plan", str(plan_path), "--out", str(out_b), "--jobs", "2"])
        assert tree_bytes(out_a) == tree_bytes(out_b)

    def test_csv_matches_run_roc_values(self, tmp_path, plan_path, mini_plan):
        out = tmp_path / "r"
        main(["roc", "--plan", str(plan_path), "--out", str(out)])
        curves = cs.run_roc(mini_plan)
        lines = (out / f"roc_{mini_plan.snr_db_list[0]:g}.csv").read_text().splitlines()
        theoretical, empirical = curves[0]
        for line, preset, (pf_e, pd_e), (_, pd_t) in zip(
                lines[1:], mini_plan.pf_grid, empirical.points, theoretical.points):
            cells = line.split(",")
            assert float(cells[0]) == pytest.approx(preset, rel=1e-8)
            assert float(cells[1]) == pytest.approx(pf_e, rel=1e-8)
            assert float(cells[2]) == pytest.approx(pd_t, rel=1e-8)
            assert float(cells[3]) == pytest.approx(pd_e, rel=1e-8)
            assert int(cells[5]) == mini_plan.signal_windows_m


class TestOverridesAndErrors:
    def test_set_override_reflected_in_plan(self, tmp_path, plan_path):
        out = tmp_path / "g"
        code = main(["gen", "--plan", str(plan_path), "--out", str(out),
                     "--set", "master_seed=123", "--set", "signal.modulation_index=0.25"])
        assert code == 0
        resolved = json.loads((out / "plan.json").read_text())
        assert resolved["master_seed"] == 123
        assert resolved["signal"]["modulation_index"] == 0.25

    def test_unknown_override_key_is_config_error(self, tmp_path, plan_path, capsys):
        code = main(["gen", "--plan", str(plan_path), "--out", str(tmp_path / "g"),
                     "--set", "signal.carier=1"])
        assert code == 2

    def test_invalid_plan_is_config_error(self, tmp_path, capsys):
        bad = tmp_path / "plan.json"
        bad.write_text(json.dumps({"signal": {}}))
        code = main(["collect", "--plan", str(bad), "--out", str(tmp_path / "c")])
        assert code == 2

    def test_missing_plan_file_is_io_error(self, tmp_path):
        code = main(["collect", "--plan", str(tmp_path / "none.json"),
                     "--out", str(tmp_path / "c")])
        assert code == 4

    def test_invalid_plan_invariant_is_config_error(self, tmp_path, plan_path, capsys):
        code = main(["collect", "--plan", str(plan_path), "--out", str(tmp_path / "c"),
                     "--set", "noise_windows=10"])
        assert code == 2
