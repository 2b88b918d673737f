import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

from gravibar.cli import ConfigError, main, parse_config

MONO_CONFIG = """\
[detector]
material = niobium
length = 1.0
radius = 0.5
quality = 1e10
temperature = 1e-3

[source]
type = monochromatic
h0 = 5e-22
frequency_hz = 2500

[measurement]
dt = 1e-2
t_m = 0.5
t_meas = 2.0
dim = 10
seed = 42
n_traj = 2
duration = 2.0

[output]
directory = {out}
stride = 3
"""

CHIRP_CONFIG = """\
[detector]
material = beryllium
frequency_hz = 100
radius = 0.5
mass = optimal

[source]
type = chirp
h0 = 2e-22
chirp_mass_msun = 1.19
nu0_hz = 30

[output]
directory = {out}
"""


def write_config(tmp_path: Path, text: str, name: str = "run.ini") -> str:
    out = tmp_path / "out"
    path = tmp_path / name
    path.write_text(text.format(out=out))
    return str(path)


def read_csv(path: Path) -> dict[str, float]:
    rows = path.read_text().strip().splitlines()[1:]
    return {line.split(",")[0]: float(line.split(",")[1]) for line in rows}


class TestParseConfig:
    def test_minimal_defaults_recorded(self, tmp_path):
        cfg = parse_config(write_config(tmp_path, MONO_CONFIG))
        assert cfg.detector.mode_index == 1
        assert cfg.measurement.dim == 10
        assert cfg.measurement.record_stride == 3
        assert cfg.resolved["detector"]["mode_index"] == 1
        assert cfg.resolved["measurement"]["t_meas"] == 2.0

    def test_optimal_mass_resolution(self, tmp_path):
        cfg = parse_config(write_config(tmp_path, CHIRP_CONFIG))
        assert cfg.mass_resolved_optimal
        assert 10.0 < cfg.detector.mass < 20.0
        assert cfg.resolved["detector"]["mass_resolution"] == "optimal"

    def test_type_mismatch_names_key(self, tmp_path):
        text = MONO_CONFIG.replace("dt = 1e-2", "dt = fast")
        with pytest.raises(ConfigError, match=r"\[measurement\] dt"):
            parse_config(write_config(tmp_path, text))

    def test_unknown_key_rejected(self, tmp_path):
        text = MONO_CONFIG + "\n[detector]\n"  # duplicate section is an error
        text = MONO_CONFIG.replace("radius = 0.5", "radius = 0.5\ncolour = red")
        with pytest.raises(ConfigError, match="colour"):
            parse_config(write_config(tmp_path, text))

    def test_unknown_section_rejected(self, tmp_path):
        text = MONO_CONFIG + "\n[telescope]\nkind = optical\n"
        with pytest.raises(ConfigError, match=r"\[telescope\]"):
            parse_config(write_config(tmp_path, text))

    def test_missing_required_key(self, tmp_path):
        text = MONO_CONFIG.replace("h0 = 5e-22\n", "")
        with pytest.raises(ConfigError, match="h0"):
            parse_config(write_config(tmp_path, text))

    def test_length_and_frequency_exclusive(self, tmp_path):
        text = MONO_CONFIG.replace(
            "length = 1.0", "length = 1.0\nfrequency_hz = 100"
        )
        with pytest.raises(ConfigError, match="exclusive"):
            parse_config(write_config(tmp_path, text))

    def test_window_keys_paired(self, tmp_path):
        text = MONO_CONFIG.replace(
            "frequency_hz = 2500", "frequency_hz = 2500\nwindow_start = 0.0"
        )
        with pytest.raises(ConfigError, match="window"):
            parse_config(write_config(tmp_path, text))

    def test_missing_config_file(self):
        with pytest.raises(ConfigError, match="not found"):
            parse_config("/nonexistent/run.ini")


class TestRates:
    def test_niobium_spontaneous_row(self, tmp_path, capsys):
        path = write_config(tmp_path, MONO_CONFIG)
        assert main(["rates", "--config", path]) == 0
        table = read_csv(tmp_path / "out" / "rates.csv")
        assert 0.5e-33 < table["gamma_spontaneous_hz"] < 2e-33
        assert table["gamma_stimulated_hz"] > 0.0
        assert "gamma_spontaneous_hz" in capsys.readouterr().out

    def test_metadata_written(self, tmp_path):
        path = write_config(tmp_path, MONO_CONFIG)
        main(["rates", "--config", path])
        meta = json.loads((tmp_path / "out" / "metadata.json").read_text())
        assert meta["command"] == "rates"
        assert meta["resolved_config"]["version"]
        assert meta["resolved_config"]["constants"]["hbar"] == 1.054571817e-34


class TestChi:
    def test_methods_agree_on_resonance(self, tmp_path):
        path = write_config(tmp_path, MONO_CONFIG)
        assert main(["chi", "--config", path]) == 0
        lines = (tmp_path / "out" / "chi.csv").read_text().strip().splitlines()
        values = {row.split(",")[0]: float(row.split(",")[1]) for row in lines[1:]}
        assert values["quadrature"] == pytest.approx(
            values["monochromatic_closed_form"], rel=0.02
        )

    def test_chirp_methods_present(self, tmp_path):
        text = CHIRP_CONFIG + "\n[measurement]\nduration = 60\n"
        path = write_config(tmp_path, text)
        assert main(["chi", "--config", path]) == 0
        content = (tmp_path / "out" / "chi.csv").read_text()
        for method in ("quadrature", "stationary_phase", "chirp_analytic"):
            assert method in content


class TestOptimalMass:
    def test_ns_merger_mass_range(self, tmp_path):
        path = write_config(tmp_path, CHIRP_CONFIG)
        assert main(["optimal-mass", "--config", path]) == 0
        table = read_csv(tmp_path / "out" / "optimal_mass.csv")
        assert 10.0 < table["optimal_mass_kg"] < 20.0
        assert table["beta_mag"] == pytest.approx(1.0, rel=1e-9)


class TestSimulate:
    def test_byte_identical_reruns(self, tmp_path):
        path = write_config(tmp_path, MONO_CONFIG)
        assert main(["simulate", "--config", path, "--out", str(tmp_path / "a")]) == 0
        assert main(["simulate", "--config", path, "--out", str(tmp_path / "b")]) == 0
        names = sorted(os.listdir(tmp_path / "a"))
        assert names == sorted(os.listdir(tmp_path / "b"))
        assert "trajectory_0.csv" in names
        assert "events_0.csv" in names
        assert "summary.csv" in names
        for name in names:
            a = (tmp_path / "a" / name).read_bytes()
            b = (tmp_path / "b" / name).read_bytes()
            assert a == b, f"{name} differs between identical runs"

    def test_seed_override_changes_readout(self, tmp_path):
        path = write_config(tmp_path, MONO_CONFIG)
        main(["simulate", "--config", path, "--out", str(tmp_path / "a")])
        main(
            ["simulate", "--config", path, "--out", str(tmp_path / "b"),
             "--seed", "7"]
        )
        a = (tmp_path / "a" / "trajectory_0.csv").read_bytes()
        b = (tmp_path / "b" / "trajectory_0.csv").read_bytes()
        assert a != b

    def test_n_traj_override(self, tmp_path):
        path = write_config(tmp_path, MONO_CONFIG)
        main(
            ["simulate", "--config", path, "--out", str(tmp_path / "c"),
             "--n-traj", "3"]
        )
        names = os.listdir(tmp_path / "c")
        assert sum(1 for n in names if n.startswith("trajectory_")) == 3

    def test_summary_columns(self, tmp_path):
        path = write_config(tmp_path, MONO_CONFIG)
        main(["simulate", "--config", path])
        header = (tmp_path / "out" / "summary.csv").read_text().splitlines()[0]
        assert header == "time,mean_rho00,mean_rho11,mean_rho22"


class TestSensitivity:
    def test_curve_written(self, tmp_path):
        path = write_config(tmp_path, MONO_CONFIG)
        assert main(["sensitivity", "--config", path]) == 0
        lines = (tmp_path / "out" / "sensitivity.csv").read_text().splitlines()
        assert lines[0] == "frequency_hz,h_c"
        assert len(lines) == 41  # default 40-point grid

    def test_reference_overlay(self, tmp_path):
        path = write_config(tmp_path, MONO_CONFIG)
        ref = tmp_path / "ref.txt"
        ref.write_text("700 1e-21\n900 2e-21\n")
        assert main(
            ["sensitivity", "--config", path, "--reference", str(ref)]
        ) == 0
        assert (tmp_path / "out" / "reference.csv").exists()

    def test_failure_removes_partial_outputs(self, tmp_path):
        path = write_config(tmp_path, MONO_CONFIG)
        ref = tmp_path / "ref.txt"
        ref.write_text("700\n900\n")  # one column: invalid
        assert main(
            ["sensitivity", "--config", path, "--reference", str(ref)]
        ) == 1
        assert not (tmp_path / "out" / "sensitivity.csv").exists()


class TestLatticeVerify:
    def test_all_checks_pass(self, tmp_path, capsys):
        out = tmp_path / "lat"
        assert main(["lattice-verify", "--out", str(out)]) == 0
        text = (out / "lattice_verify.csv").read_text()
        assert "FAIL" not in text
        assert "driven_beta_error" in text
        printed = capsys.readouterr().out
        assert "pass" in printed


class TestErrors:
    def test_bad_config_exit_code(self, tmp_path, capsys):
        text = MONO_CONFIG.replace("dt = 1e-2", "dt = fast")
        path = write_config(tmp_path, text)
        assert main(["rates", "--config", path]) == 2
        assert "dt" in capsys.readouterr().err

    def test_unknown_material_message(self, tmp_path, capsys):
        text = MONO_CONFIG.replace("material = niobium", "material = wood")
        path = write_config(tmp_path, text)
        assert main(["rates", "--config", path]) == 2
        assert "wood" in capsys.readouterr().err
