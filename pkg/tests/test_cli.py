"""Tests for the command-line interface and its file formats."""

import numpy as np
import pytest

from eitshape.cli import (ConfigError, bundled_scenarios, load_config, main,
                          read_field_csv, run_scenario, validate_config)


def write_scenario(tmp_path, name="case", **overrides):
    """Minimal factorization scenario file with optional overrides."""
    sections = {
        "geometry": {"kind": "concentric_disc", "radius": "0.5"},
        "gamma": {"kind": "constant", "value": "1.0"},
        "forward": {"path": "series", "truncation": "20",
                    "boundary_nodes": "64"},
        "noise": {"delta": "0.0", "seed": "0"},
        "method": {"kind": "factorization", "filter": "tikhonov",
                   "alpha": "1e-7", "level": "0.1"},
        "sampling": {"step": "0.1"},
    }
    for key, items in overrides.items():
        sections.setdefault(key, {}).update(items)
    lines = []
    for sec, items in sections.items():
        lines.append("[%s]" % sec)
        lines.extend("%s = %s" % kv for kv in items.items())
        lines.append("")
    path = tmp_path / ("%s.ini" % name)
    path.write_text("\n".join(lines))
    return path


class TestConfigLoading:
    def test_bundled_scenarios_exist_and_validate(self):
        names = bundled_scenarios()
        assert len(names) >= 5
        for name in names:
            cfg = load_config(name)
            assert validate_config(cfg) == [], name

    def test_unknown_scenario_is_a_config_error(self):
        with pytest.raises(ConfigError):
            load_config("no_such_scenario")

    def test_file_path_and_defaults(self, tmp_path):
        path = write_scenario(tmp_path)
        cfg = load_config(str(path))
        assert cfg.name == "case"
        assert cfg.geometry_kind == "concentric_disc"
        assert cfg.method == "factorization"
        assert cfg.path == "series"
        assert cfg.boundary_nodes == 64

    def test_malformed_ini_is_a_config_error(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("geometry]\nkind oops\n")
        with pytest.raises(ConfigError):
            load_config(str(bad))


class TestValidation:
    def test_music_premise_names_the_component_count(self, tmp_path):
        path = write_scenario(
            tmp_path,
            geometry={"kind": "small_discs",
                      "centers": "0.25 0.0; -0.25 0.0; 0.0 0.3",
                      "scales": "1 1 1", "epsilon": "0.01"},
            forward={"path": "born", "max_order": "2"},
            method={"kind": "music", "tau": "0.01"})
        problems = validate_config(load_config(str(path)))
        assert any("violated premise" in p for p in problems)
        assert any("max_order + 1 > J" in p for p in problems)

    def test_nonpositive_gamma_is_rejected(self, tmp_path):
        path = write_scenario(tmp_path, gamma={"value": "0.0"})
        problems = validate_config(load_config(str(path)))
        assert any("positive" in p for p in problems)

    def test_odd_boundary_grid_is_rejected(self, tmp_path):
        path = write_scenario(tmp_path, forward={"boundary_nodes": "63"})
        problems = validate_config(load_config(str(path)))
        assert any("even" in p for p in problems)

    def test_series_path_requires_concentric_disc(self, tmp_path):
        path = write_scenario(
            tmp_path,
            geometry={"kind": "star", "base": "0.25", "amplitude": "0.1",
                      "frequency": "3"})
        problems = validate_config(load_config(str(path)))
        assert any("concentric disc" in p for p in problems)


class TestExitCodes:
    def test_run_succeeds(self, tmp_path):
        path = write_scenario(tmp_path)
        out = tmp_path / "out"
        assert main(["run", "--config", str(path), "--out", str(out),
                     "--quiet"]) == 0

    def test_validate_ok(self, tmp_path):
        path = write_scenario(tmp_path)
        assert main(["validate", "--config", str(path), "--quiet"]) == 0

    def test_config_problems_exit_2(self, tmp_path, capsys):
        path = write_scenario(tmp_path, gamma={"value": "-1.0"})
        assert main(["validate", "--config", str(path)]) == 2
        assert "invalid:" in capsys.readouterr().err
        out = tmp_path / "out"
        assert main(["run", "--config", str(path), "--out", str(out)]) == 2

    def test_missing_config_exits_2(self, capsys):
        assert main(["run", "--config", "missing_scenario"]) == 2
        assert "config error:" in capsys.readouterr().err

    def test_solver_failure_exits_3(self, tmp_path, capsys):
        """A coefficient at the bottom of the floating-point range passes
        validation but underflows the filtered indicator to zero, which the
        imaging stage reports as a solver failure."""
        path = write_scenario(tmp_path, gamma={"value": "1e-300"})
        out = tmp_path / "out"
        assert main(["run", "--config", str(path), "--out", str(out)]) == 3
        assert "solver error:" in capsys.readouterr().err


class TestRunOutputs:
    def test_factorization_run_writes_all_files(self, tmp_path):
        path = write_scenario(tmp_path)
        out = tmp_path / "out"
        assert main(["run", "--config", str(path), "--out", str(out),
                     "--quiet"]) == 0
        for name in ("field.csv", "spectrum.csv", "heatmap.pgm",
                     "contour.csv", "field.png", "spectrum.png",
                     "report.txt"):
            assert (out / name).is_file(), name

    def test_music_run_writes_peaks(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "--config", "music_two_discs", "--out",
                     str(out), "--quiet"]) == 0
        assert (out / "peaks.csv").is_file()
        peaks = np.loadtxt(out / "peaks.csv", delimiter=",", skiprows=1,
                           ndmin=2)
        assert peaks.shape[0] == 2

    def test_runs_are_deterministic(self, tmp_path):
        path = write_scenario(tmp_path, noise={"delta": "0.02", "seed": "5"})
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["run", "--config", str(path), "--out", str(out1), "--quiet"])
        main(["run", "--config", str(path), "--out", str(out2), "--quiet"])
        assert ((out1 / "field.csv").read_bytes()
                == (out2 / "field.csv").read_bytes())
        assert ((out1 / "contour.csv").read_bytes()
                == (out2 / "contour.csv").read_bytes())

    def test_seed_flag_changes_noisy_output(self, tmp_path):
        path = write_scenario(tmp_path, noise={"delta": "0.05", "seed": "5"})
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["run", "--config", str(path), "--out", str(out1), "--quiet"])
        main(["run", "--config", str(path), "--out", str(out2), "--seed",
              "99", "--quiet"])
        assert ((out1 / "field.csv").read_bytes()
                != (out2 / "field.csv").read_bytes())

    def test_report_is_key_value_lines(self, tmp_path):
        path = write_scenario(tmp_path)
        out = tmp_path / "out"
        main(["run", "--config", str(path), "--out", str(out), "--quiet"])
        lines = (out / "report.txt").read_text().strip().splitlines()
        assert lines
        for line in lines:
            key, _, value = line.partition(" = ")
            assert key and value

    def test_pgm_header_and_size(self, tmp_path):
        path = write_scenario(tmp_path)
        out = tmp_path / "out"
        main(["run", "--config", str(path), "--out", str(out), "--quiet"])
        blob = (out / "heatmap.pgm").read_bytes()
        magic, dims, maxval, payload = blob.split(b"\n", 3)
        assert magic == b"P5"
        w, h = (int(v) for v in dims.split())
        assert maxval == b"255"
        assert len(payload) == w * h


class TestFieldRoundTrip:
    def test_field_csv_round_trips_exactly(self, tmp_path):
        path = write_scenario(tmp_path)
        out = tmp_path / "out"
        main(["run", "--config", str(path), "--out", str(out), "--quiet"])
        field = read_field_csv(out / "field.csv")
        text = (out / "field.csv").read_text().strip().splitlines()
        assert text[0] == "x,y,W"
        rows = np.array([[float(v) for v in line.split(",")]
                         for line in text[1:]])
        np.testing.assert_array_equal(field.masked_values(),
                                      rows[:, 2])

    def test_round_trip_preserves_values_bitwise(self, tmp_path):
        path = write_scenario(tmp_path)
        out = tmp_path / "out"
        main(["run", "--config", str(path), "--out", str(out), "--quiet"])
        from eitshape.cli import write_field_csv
        field = read_field_csv(out / "field.csv")
        write_field_csv(out / "again.csv", field)
        assert ((out / "field.csv").read_bytes()
                == (out / "again.csv").read_bytes())


class TestAuxiliaryCommands:
    def test_spectrum_command(self, tmp_path):
        path = write_scenario(tmp_path)
        out = tmp_path / "out"
        assert main(["spectrum", "--config", str(path), "--out", str(out),
                     "--quiet"]) == 0
        lines = (out / "spectrum.csv").read_text().strip().splitlines()
        assert lines[0] == "j,sigma"
        first = lines[1].split(",")
        assert int(first[0]) == 1
        sig = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(a >= b - 1e-15 for a, b in zip(sig, sig[1:]))

    def test_scaling_command_requires_small_discs(self, tmp_path):
        path = write_scenario(tmp_path)
        out = tmp_path / "out"
        assert main(["scaling", "--config", str(path), "--out",
                     str(out)]) == 2

    def test_scaling_command_reports_slopes(self, tmp_path):
        out = tmp_path / "out"
        assert main(["scaling", "--config", "scaling_single_disc", "--out",
                     str(out), "--quiet"]) == 0
        report = (out / "report.txt").read_text()
        assert "born_slope" in report
        assert (out / "scaling.csv").is_file()
        assert (out / "scaling.png").is_file()

    def test_convergence_command(self, tmp_path):
        path = write_scenario(tmp_path)
        out = tmp_path / "out"
        assert main(["convergence", "--config", str(path), "--out",
                     str(out), "--quiet"]) == 0
        lines = (out / "convergence.csv").read_text().strip().splitlines()
        assert lines[0].startswith("order,")
        assert (out / "convergence.png").is_file()
