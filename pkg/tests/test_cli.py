import math
import subprocess
import sys

import numpy as np

from vcquad.cli import EXIT_CONFIG, EXIT_IRREGULAR, EXIT_OK, main
from vcquad.harness.csvlog import ARC_COLUMNS


def test_list_scenarios(capsys):
    assert main(["list-scenarios"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("geometry-arc")
    assert len(out.splitlines()) == 5


def test_run_success_uses_env_root(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("VCQUAD_OUT", str(tmp_path))
    assert main(["run", "torque-trace", "--set", "sim.T=0.2"]) == EXIT_OK
    assert (tmp_path / "torque-trace" / "damped.csv").exists()
    assert (tmp_path / "torque-trace" / "torques.svg").exists()
    assert "damped:" in capsys.readouterr().out


def test_run_with_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("sim.T = 0.1\nsim.h = 0.01\n")
    assert main(["run", "invariance-on-manifold", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK
    lines = (tmp_path / "o" / "invariance.csv").read_text().splitlines()
    assert len(lines) == 1 + 11


def test_print_config(capsys):
    assert main(["run", "torque-trace", "--print-config", "--set", "gains.k_z=7"]) == EXIT_OK
    assert "gains.damped.k_z = 7" in capsys.readouterr().out


def test_regularity_abort_exit_code(tmp_path, capsys):
    code = main(["run", "vertical-residual-compare", "--out", str(tmp_path), "--set", "sim.T=6", "--set", "sim.h=0.002"])
    assert code == EXIT_IRREGULAR
    assert "regularity abort" in capsys.readouterr().err


def test_config_error_exit_codes(tmp_path, capsys):
    assert main(["run", "no-such-scenario", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["run", "torque-trace", "--set", "vehicle.m=0", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["run", "torque-trace", "--set", "oops", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["run", "torque-trace", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
    assert main(["frobnicate"]) == EXIT_CONFIG
    assert main(["emit-arc", "--n", "1"]) == EXIT_CONFIG
    capsys.readouterr()


def test_emit_arc_stdout(capsys):
    assert main(["emit-arc", "--n", "3", "--theta-min", "20", "--theta-max", "150"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split(",") == ARC_COLUMNS
    rows = [list(map(float, ln.split(","))) for ln in lines[1:]]
    assert [r[0] for r in rows] == [20.0, 85.0, 150.0]
    assert np.allclose(rows[0][1:4], [0.9 * math.cos(math.radians(20)), 0.9 * math.sin(math.radians(20)), 0.58])


def test_emit_arc_infeasible_exit_code(tmp_path):
    assert main(["emit-arc", "--r", "0.01", "--z0", "1.0", "--out", str(tmp_path / "a.csv")]) == EXIT_IRREGULAR


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "vcquad", "list-scenarios"], capture_output=True, text=True)
    assert proc.returncode == 0 and "torque-trace" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "vcquad", "run", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 3
