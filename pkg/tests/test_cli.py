"""End-to-end CLI runs: files, summaries, exit codes, determinism."""

import csv
import json

import numpy as np
import pytest

from whichpath.cli import main
from whichpath.config import parse_config, render_config


def write_config(tmp_path, text, name="scenario.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    header, data = rows[0], rows[1:]
    return header, data


def column(path, index):
    _, data = read_csv(path)
    return np.array([float(row[index]) for row in data])


HEISENBERG = """
[scenario]
kind = heisenberg

[geometry]
separation = 1.0
wavelength = 0.1
profile = point

[detector]
k_gamma = {k_gamma}
"""

MICROMASER = """
[scenario]
kind = micromaser

[geometry]
separation = 1.0
wavelength = 0.1
profile = point

[detector]
cavity_length = 10.0
"""

CUSTOM_SINGLE = """
[scenario]
kind = custom

[geometry]
separation = 1.0
wavelength = 0.1
profile = point

[detector]
channels = 1.0 1 1
"""

ERASER = """
[scenario]
kind = eraser

[geometry]
separation = 1.0
wavelength = 0.1
profile = point

[eraser]
chi = 0.0 0.7853981633974483 1.5707963267948966 3.141592653589793
"""


class TestSimulate:
    def test_micromaser_fringes_vanish(self, tmp_path, capsys):
        cfg = write_config(tmp_path, MICROMASER)
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["fitted_visibility"] <= 1e-3
        assert abs(summary["overlap"]["abs"]) <= 1e-3
        assert (out / "pattern.csv").exists()

    def test_trivial_custom_detector_keeps_full_contrast(self, tmp_path, capsys):
        cfg = write_config(tmp_path, CUSTOM_SINGLE)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["fitted_visibility"] == pytest.approx(1.0, abs=1e-6)

    def test_half_pi_recoil_visibility(self, tmp_path, capsys):
        cfg = write_config(tmp_path, HEISENBERG.format(k_gamma=np.pi / 2))
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["fitted_visibility"] == pytest.approx(0.6366, abs=2e-3)

    def test_pattern_csv_has_units_header_and_envelope(self, tmp_path):
        cfg = write_config(tmp_path, CUSTOM_SINGLE)
        out = tmp_path / "o"
        main(["simulate", "--config", cfg, "--out", str(out), "--quiet"])
        header, data = read_csv(out / "pattern.csv")
        assert header == ["p_x (1/len)", "P (len)", "envelope (len)"]
        assert len(data) == 4096

    def test_manifest_lists_written_files_with_sizes(self, tmp_path, capsys):
        cfg = write_config(tmp_path, CUSTOM_SINGLE)
        out = tmp_path / "o"
        main(["simulate", "--config", cfg, "--out", str(out)])
        summary = json.loads(capsys.readouterr().out)
        for entry in summary["files"]:
            path = out / entry["path"]
            assert path.exists()
            assert path.stat().st_size == entry["bytes"]

    def test_svg_flag_renders_figure(self, tmp_path, capsys):
        cfg = write_config(tmp_path, CUSTOM_SINGLE)
        out = tmp_path / "o"
        main(["simulate", "--config", cfg, "--out", str(out), "--svg"])
        summary = json.loads(capsys.readouterr().out)
        assert (out / "pattern.svg").exists()
        assert any(entry["path"] == "pattern.svg" for entry in summary["files"])

    def test_quiet_suppresses_stdout(self, tmp_path, capsys):
        cfg = write_config(tmp_path, CUSTOM_SINGLE)
        main(["simulate", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"])
        assert capsys.readouterr().out == ""

    def test_seed_override_recorded(self, tmp_path, capsys):
        cfg = write_config(tmp_path, CUSTOM_SINGLE)
        main(["simulate", "--config", cfg, "--out", str(tmp_path / "o"), "--seed", "42"])
        assert json.loads(capsys.readouterr().out)["seed"] == 42

    def test_config_echo_round_trips(self, tmp_path, capsys):
        cfg = write_config(tmp_path, MICROMASER)
        main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")])
        summary = json.loads(capsys.readouterr().out)
        original = parse_config(MICROMASER, mode="simulate")
        assert parse_config(render_config(summary["config"]), mode="simulate") == original


class TestDeterminism:
    def test_identical_runs_are_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, MICROMASER)
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["simulate", "--config", cfg, "--out", str(out), "--quiet"]) == 0
            outs.append(out)
        for filename in ("pattern.csv", "summary.json"):
            assert (outs[0] / filename).read_bytes() == (outs[1] / filename).read_bytes()

    def test_decompose_runs_are_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, MICROMASER)
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["decompose", "--config", cfg, "--out", str(out), "--quiet"]) == 0
            outs.append(out)
        for filename in ("components.csv", "histogram.csv", "summary.json"):
            assert (outs[0] / filename).read_bytes() == (outs[1] / filename).read_bytes()


class TestSweep:
    def test_recoil_sweep_tracks_closed_form(self, tmp_path, capsys):
        text = HEISENBERG.replace("k_gamma = {k_gamma}\n", "") + (
            "\n[sweep]\nparameter = k_gamma_d\n"
            f"start = {4 * np.pi / 32}\nstop = {4 * np.pi}\ncount = 32\n"
        )
        cfg = write_config(tmp_path, text)
        out = tmp_path / "o"
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        xs = column(out / "sweep.csv", 0)
        fitted = column(out / "sweep.csv", 1)
        analytic = column(out / "sweep.csv", 2)
        assert np.allclose(analytic, np.sin(xs) / xs, atol=1e-12)
        assert np.max(np.abs(fitted - np.sin(xs) / xs)) <= 1e-3
        summary = json.loads(capsys.readouterr().out)
        assert summary["max_abs_error"] <= 1e-3

    def test_sweep_endpoints(self, tmp_path):
        text = HEISENBERG.replace("k_gamma = {k_gamma}\n", "") + (
            "\n[sweep]\nparameter = k_gamma_d\n"
            f"start = 1e-3\nstop = {2 * np.pi}\ncount = 2\n"
        )
        cfg = write_config(tmp_path, text)
        out = tmp_path / "o"
        assert main(["sweep", "--config", cfg, "--out", str(out), "--quiet"]) == 0
        fitted = column(out / "sweep.csv", 1)
        assert fitted[0] == pytest.approx(1.0, abs=1e-6)  # long-wavelength limit
        assert abs(fitted[-1]) <= 1e-3  # node of the closed form

    def test_cavity_lag_sweep_matches_triangle(self, tmp_path):
        text = MICROMASER + "\n[sweep]\nparameter = shift_over_length\nstart = 0.25\nstop = 1.0\ncount = 4\n"
        cfg = write_config(tmp_path, text)
        out = tmp_path / "o"
        assert main(["sweep", "--config", cfg, "--out", str(out), "--quiet"]) == 0
        xs = column(out / "sweep.csv", 0)
        fitted = column(out / "sweep.csv", 1)
        analytic = column(out / "sweep.csv", 2)
        assert np.allclose(analytic, np.maximum(0.0, 1.0 - xs), atol=1e-15)
        assert fitted[np.argmin(np.abs(xs - 0.5))] == pytest.approx(0.5, abs=2e-3)
        assert np.max(np.abs(fitted - analytic)) <= 3e-3


class TestDecompose:
    def test_plus_minus_run_yields_two_rows(self, tmp_path, capsys):
        text = ERASER.replace("[eraser]\nchi = 0.0 0.7853981633974483 1.5707963267948966 3.141592653589793", "")
        cfg = write_config(tmp_path, text)
        out = tmp_path / "o"
        assert main(["decompose", "--config", cfg, "--out", str(out)]) == 0
        header, data = read_csv(out / "components.csv")
        assert len(data) == 2
        phases = sorted(float(row[3]) for row in data)
        assert phases[0] == 0.0 and phases[1] == pytest.approx(np.pi, abs=0)
        summary = json.loads(capsys.readouterr().out)
        assert summary["component_count"] == 2

    def test_cavity_channels_all_unit_contrast(self, tmp_path):
        cfg = write_config(tmp_path, MICROMASER)
        out = tmp_path / "o"
        assert main(["decompose", "--config", cfg, "--out", str(out), "--quiet"]) == 0
        vis = column(out / "components.csv", 2)
        assert np.max(np.abs(vis - 1.0)) <= 1e-12

    def test_disjoint_custom_detector_has_empty_histogram(self, tmp_path, capsys):
        text = CUSTOM_SINGLE.replace("channels = 1.0 1 1", "channels =\n    1.0 1 0\n    1.0 0 1")
        cfg = write_config(tmp_path, text)
        out = tmp_path / "o"
        assert main(["decompose", "--config", cfg, "--out", str(out)]) == 0
        masses = column(out / "histogram.csv", 2)
        assert np.all(masses == 0.0)
        summary = json.loads(capsys.readouterr().out)
        assert summary["spread"]["excluded_mass"] == pytest.approx(1.0, abs=1e-12)

    def test_spread_diagnostics_present(self, tmp_path, capsys):
        cfg = write_config(tmp_path, MICROMASER)
        assert main(["decompose", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["spread"]["phase_iqr_rad"] >= 1.0
        assert "unwrapped_phase_iqr_rad" in summary["spread"]
        assert summary["spread"]["spread_measure"] == "weighted interquartile range"


class TestErase:
    def test_fringes_and_antifringes_with_sum_rule(self, tmp_path, capsys):
        cfg = write_config(tmp_path, ERASER)
        out = tmp_path / "o"
        assert main(["erase", "--config", cfg, "--out", str(out)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["max_sum_rule_residual"] <= 1e-12
        rows = summary["per_chi"]
        assert len(rows) == 4
        for row in rows:
            assert row["v_fitted"] == pytest.approx(1.0, abs=1e-6)
            delta = (row["phi_fitted"] - row["chi"] + np.pi) % (2 * np.pi) - np.pi
            assert abs(delta) <= 1e-6
        assert summary["momentum_transfers_times_d"]["p_plus"] == 0.0
        assert summary["momentum_transfers_times_d"]["p_minus"] == pytest.approx(np.pi, rel=1e-15)

    def test_one_pattern_file_per_phase(self, tmp_path):
        cfg = write_config(tmp_path, ERASER)
        out = tmp_path / "o"
        assert main(["erase", "--config", cfg, "--out", str(out), "--quiet"]) == 0
        for index in range(4):
            assert (out / f"erase_chi{index:03d}.csv").exists()
        header, _ = read_csv(out / "erase_chi000.csv")
        assert header == ["p_x (1/len)", "P_plus (len)", "P_minus (len)", "envelope (len)"]

    def test_pi_phase_swaps_ports(self, tmp_path):
        cfg = write_config(tmp_path, ERASER)
        out = tmp_path / "o"
        main(["erase", "--config", cfg, "--out", str(out), "--quiet"])
        plus_at_0 = column(out / "erase_chi000.csv", 1)
        minus_at_pi = column(out / "erase_chi003.csv", 2)
        assert np.max(np.abs(plus_at_0 - minus_at_pi)) <= 1e-15


class TestExitCodes:
    def test_invalid_config_exits_2_with_diagnostics(self, tmp_path, capsys):
        cfg = write_config(tmp_path, HEISENBERG.format(k_gamma="fast"))
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        err = capsys.readouterr().err
        assert "k_gamma" in err and "[detector]" in err

    def test_missing_config_file_exits_2(self, tmp_path, capsys):
        assert main(["simulate", "--config", str(tmp_path / "nope.cfg")]) == 2
        assert "cannot read config" in capsys.readouterr().err

    def test_semantically_bad_model_exits_2(self, tmp_path, capsys):
        # cavities shorter than the slit separation cannot be built
        cfg = write_config(tmp_path, MICROMASER.replace("cavity_length = 10.0", "cavity_length = 0.5"))
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        assert "cavity" in capsys.readouterr().err

    def test_numerical_failure_exits_3(self, tmp_path, capsys):
        # envelope zeros inside the fit window make the visibility fit fail
        text = CUSTOM_SINGLE.replace(
            "profile = point", "profile = rectangular\nwidth = 0.5"
        ) + "\n[grid]\nn_points = 4097\n"
        cfg = write_config(tmp_path, text)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 3
        assert "run failed" in capsys.readouterr().err

    def test_unknown_key_exits_2(self, tmp_path, capsys):
        text = CUSTOM_SINGLE.replace("profile = point", "profile = point\ncolor = red")
        cfg = write_config(tmp_path, text)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        assert "color" in capsys.readouterr().err


class TestOutputPlumbing:
    def test_prefix_applied_to_all_files(self, tmp_path, capsys):
        text = CUSTOM_SINGLE + "\n[output]\nprefix = demo_\n"
        cfg = write_config(tmp_path, text)
        out = tmp_path / "o"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        assert (out / "demo_pattern.csv").exists()
        assert (out / "demo_summary.json").exists()
        summary = json.loads(capsys.readouterr().out)
        assert summary["files"][0]["path"] == "demo_pattern.csv"

    def test_out_dir_from_config_used_when_no_flag(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        text = CUSTOM_SINGLE + "\n[output]\nout_dir = nested/results\n"
        cfg = write_config(tmp_path, text)
        assert main(["simulate", "--config", cfg, "--quiet"]) == 0
        assert (tmp_path / "nested" / "results" / "pattern.csv").exists()

    def test_fixed_dipole_scenario_runs(self, tmp_path, capsys):
        text = HEISENBERG.format(k_gamma=2.0).replace(
            "k_gamma = 2.0", "k_gamma = 2.0\ndipole = fixed\ndipole_direction = 1 0 0"
        )
        cfg = write_config(tmp_path, text)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
        summary = json.loads(capsys.readouterr().out)
        # a slit-axis dipole cannot emit along the slit axis, which weakens
        # the path marking relative to the isotropic average
        assert summary["fitted_visibility"] > abs(np.sin(2.0) / 2.0)


class TestLagSweepFromZero:
    def test_zero_lag_point_reports_full_visibility(self, tmp_path):
        text = MICROMASER + "\n[sweep]\nparameter = shift_over_length\nstart = 0.0\nstop = 1.0\ncount = 5\n"
        cfg = write_config(tmp_path, text)
        out = tmp_path / "o"
        assert main(["sweep", "--config", cfg, "--out", str(out), "--quiet"]) == 0
        fitted = column(out / "sweep.csv", 1)
        analytic = column(out / "sweep.csv", 2)
        assert fitted[0] == pytest.approx(1.0, abs=1e-12)
        assert analytic[0] == 1.0
