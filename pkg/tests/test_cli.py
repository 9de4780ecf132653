import csv
import subprocess
import sys

import pytest

from sea_delta import SCENARIO_DIR
from sea_delta.cli import main
from sea_delta.simulator import TRACE_COLUMNS

SHORT = """
name = "short_press"
[control]
mode = "hybrid"
[[trajectory.primitives]]
variant = "pressing"
target = [0.0, 0.0, -104.0]
duration = 0.3
hover_height = 4.0
approach_speed = 10.0
"""


@pytest.fixture
def short_cfg(tmp_path):
    path = tmp_path / "short.toml"
    path.write_text(SHORT)
    return path


def read_metrics(path):
    return dict(line.split("=", 1) for line in path.read_text().splitlines())


def test_run_writes_trace_metrics_figure(short_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(short_cfg), "--out", str(out)]) == 0
    with open(out / "trace.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == TRACE_COLUMNS
    assert len(rows) > 1
    m = read_metrics(out / "metrics.txt")
    assert m["mode"] == "hybrid" and m["scenario"] == "short_press"
    assert (out / "trace.png").stat().st_size > 0
    assert "steady_force_error_N=" in capsys.readouterr().out


def test_run_quiet_mode_and_no_figures(short_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(short_cfg), "--out", str(out), "--quiet", "--no-figures",
                 "--mode", "position", "--seed", "42"]) == 0
    assert capsys.readouterr().out == ""
    assert not (out / "trace.png").exists()
    m = read_metrics(out / "metrics.txt")
    assert m["mode"] == "position" and m["seed"] == "42"


def test_run_is_byte_identical(short_cfg, tmp_path):
    for name in ("a", "b"):
        assert main(["run", str(short_cfg), "--out", str(tmp_path / name), "--quiet"]) == 0
    for f in ("trace.csv", "metrics.txt", "trace.png"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_compare_outputs(short_cfg, tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare", str(short_cfg), "--out", str(out), "--quiet"]) == 0
    for f in ("trace_position.csv", "trace_hybrid.csv", "metrics_position.txt",
              "metrics_hybrid.txt", "compare.txt", "trace_compare.png"):
        assert (out / f).exists()
    summary = read_metrics(out / "compare.txt")
    assert "hybrid_trigger_tick" in summary
    assert "trigger_tick" not in read_metrics(out / "metrics_position.txt")
    assert "trigger_tick" in read_metrics(out / "metrics_hybrid.txt")
    assert float(summary["steady_force_error_position_N"]) > 0


def test_missing_file(tmp_path, capsys):
    missing = tmp_path / "nowhere.toml"
    assert main(["run", str(missing), "--out", str(tmp_path / "o")]) != 0
    assert str(missing) in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_trigger_constraint(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text(SHORT.replace('mode = "hybrid"', 'mode = "hybrid"\nf_trigger = 7.0'))
    assert main(["run", str(path), "--out", str(tmp_path / "o")]) != 0
    err = capsys.readouterr().err
    assert "control.f_trigger" in err and "f_z_ref" in err
    assert not (tmp_path / "o").exists()


def test_validate(tmp_path, capsys):
    assert main(["validate", str(SCENARIO_DIR / "y_sweep.toml")]) == 0
    bad = tmp_path / "wp.toml"
    bad.write_text('[trajectory]\nwaypoints = [[0, 0, 0, -100], [1, 0, 0, -120], [2, 300, 0, -100]]\n')
    assert main(["validate", str(bad)]) != 0
    assert "waypoints[2]" in capsys.readouterr().err
    unknown = tmp_path / "unk.toml"
    unknown.write_text(SHORT + "\n[sim]\nfrobnicate = 1\n")
    assert main(["validate", str(unknown)]) != 0
    assert "sim.frobnicate" in capsys.readouterr().err


def test_seed_range(short_cfg, capsys):
    assert main(["validate", str(short_cfg), "--seed", "-1"]) != 0
    assert "--seed" in capsys.readouterr().err


def test_module_entry_point(short_cfg):
    proc = subprocess.run([sys.executable, "-m", "sea_delta", "validate", str(short_cfg)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "ok" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "sea_delta", "run", "missing.toml"],
                          capture_output=True, text=True)
    assert proc.returncode != 0 and "missing.toml" in proc.stderr and proc.stdout == ""
