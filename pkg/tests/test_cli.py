import json
import sys
from pathlib import Path
from unittest import mock # For patching sys.argv and the verification entry point

import pytest

from capwave_core.cli import main as capwave_main
from capwave_core.config import CONFIG_FILENAME, TOOL_NAME, __version__
from capwave_core.errors import EXIT_INVALID_INPUT, EXIT_NUMERICAL_FAILURE, EXIT_REGIME_UNSUPPORTED
from capwave_core.verification import run_verify
from capwave_core.wave_model import dispersion_speed

# Helper to run capwave main with specific args
def run_capwave_cli(capsys, *args):
    """Runs the capwave CLI main function with patched sys.argv and captures output."""
    original_argv = sys.argv
    sys.argv = ['capwave'] + list(args)
    exit_code = None
    try:
        capwave_main() # calls sys.exit() on its own
    except SystemExit as e:
        exit_code = e.code
    finally:
        sys.argv = original_argv

    captured = capsys.readouterr()
    return captured.out, captured.err, exit_code

@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    # keeps a stray capwave.toml above the working directory out of the tests
    work = tmp_path / "work"
    work.mkdir()
    monkeypatch.chdir(work)
    return work

# --- Global options ---
def test_cli_version(capsys):
    out, err, exit_code = run_capwave_cli(capsys, "--version")
    assert exit_code == 0
    assert f"{TOOL_NAME} version {__version__}" in out

def test_cli_missing_config_file(capsys, tmp_path):
    out, err, exit_code = run_capwave_cli(capsys, "--config", str(tmp_path / "nope.toml"), "dispersion")
    assert exit_code == EXIT_INVALID_INPUT
    assert "not found" in err

def test_cli_unknown_option_is_invalid_input(capsys):
    out, err, exit_code = run_capwave_cli(capsys, "trajectory", "--bogus", "1")
    assert exit_code == EXIT_INVALID_INPUT

# --- `capwave dispersion` ---
def test_cli_dispersion_stdout(capsys):
    out, err, exit_code = run_capwave_cli(capsys, "dispersion", "--delta", "0.5", "--delta", "1.0", "--weber", "0")
    assert exit_code == 0, f"dispersion failed. Error: {err}"
    lines = out.strip().splitlines()
    assert lines[0] == "delta,weber,c,c_squared"
    assert len(lines) == 3
    delta, weber, c, c_sq = (float(v) for v in lines[1].split(","))
    assert (delta, weber) == (0.5, 0.0)
    assert c == dispersion_speed(0.5, 0.0)

def test_cli_dispersion_empty_grid_from_config(capsys, tmp_path):
    config = tmp_path / "empty.toml"
    config.write_text("[tool.capwave]\nsweep_deltas = []\n", encoding="utf-8")
    out, err, exit_code = run_capwave_cli(capsys, "--config", str(config), "dispersion")
    assert exit_code == EXIT_INVALID_INPUT
    assert "grid is empty" in err

def test_cli_dispersion_uses_project_config(capsys, isolated_cwd):
    (isolated_cwd / CONFIG_FILENAME).write_text("[tool.capwave]\nsweep_deltas = [0.25, 0.5, 2.0]\n", encoding="utf-8")
    out, err, exit_code = run_capwave_cli(capsys, "dispersion", "-o", "table.csv")
    assert exit_code == 0, err
    rows = (isolated_cwd / "table.csv").read_text(encoding="utf-8").strip().splitlines()
    assert len(rows) == 4
    assert "Wrote 3 rows" in out

# --- `capwave field` ---
def test_cli_field_grid(capsys):
    out, err, exit_code = run_capwave_cli(capsys, "field", "--delta", "0.5", "--c0", "0.1", "--nx", "3", "--nz", "2")
    assert exit_code == 0, err
    lines = out.strip().splitlines()
    assert lines[0] == "x,z,eta,u,v,p"
    assert len(lines) == 1 + 6

def test_cli_field_bad_current(capsys):
    out, err, exit_code = run_capwave_cli(capsys, "field", "--c0", "fast")
    assert exit_code == EXIT_INVALID_INPUT
    assert "--c0" in err

# --- `capwave trajectory` ---
def test_cli_trajectory_invalid_height(capsys):
    out, err, exit_code = run_capwave_cli(capsys, "trajectory", "--z0", "1.5")
    assert exit_code == EXIT_INVALID_INPUT
    assert "z0" in err

def test_cli_trajectory_invalid_method(capsys):
    out, err, exit_code = run_capwave_cli(capsys, "trajectory", "--method", "magic")
    assert exit_code == EXIT_INVALID_INPUT

def test_cli_trajectory_equal_current_exact_needs_fallback(capsys, isolated_cwd):
    out, err, exit_code = run_capwave_cli(capsys, "trajectory", "--c0", "equal", "--method", "exact",
                                          "--no-fallback", "--t-end", "0.5", "--dt-out", "0.1")
    assert exit_code == EXIT_REGIME_UNSUPPORTED
    assert "fallback" in err
    assert not (isolated_cwd / "trajectory.csv").exists()

def test_cli_trajectory_equal_current_with_fallback(capsys, isolated_cwd):
    out, err, exit_code = run_capwave_cli(capsys, "trajectory", "--c0", "equal", "--z0", "0.3", "--method", "exact",
                                          "--fallback", "--t-end", "0.5", "--dt-out", "0.05", "-o", "eq")
    assert exit_code == 0, err
    assert (isolated_cwd / "eq.csv").is_file()
    assert "x component integrated numerically" in out
    assert "Trajectory run successful." in out

def test_cli_trajectory_both_writes_three_files(capsys, isolated_cwd):
    c0 = repr(dispersion_speed(0.8, 0.0) + 0.06)
    out, err, exit_code = run_capwave_cli(capsys, "trajectory", "--delta", "0.8", "--c0", c0, "--x0", "-0.04",
                                          "--z0", "0.05", "--t-end", "0.5", "--dt-out", "0.05", "--method", "both",
                                          "-o", "runs/mid")
    assert exit_code == 0, err
    for name in ("mid_exact.csv", "mid_numeric.csv", "mid_diff.csv"):
        assert (isolated_cwd / "runs" / name).is_file(), name
    assert "Largest exact/numeric difference" in out
    exact_lines = (isolated_cwd / "runs" / "mid_exact.csv").read_text(encoding="utf-8").splitlines()
    assert exact_lines[0] == "t,x,z,X,Z,u,v,p"
    assert len(exact_lines) == 1 + 11

def test_cli_trajectory_json_and_plot_data(capsys, isolated_cwd):
    out, err, exit_code = run_capwave_cli(capsys, "-v", "trajectory", "--c0", "0.2", "--t-end", "0.2",
                                          "--dt-out", "0.1", "--format", "json", "--plot-data", "-o", "p")
    assert exit_code == 0, err
    assert "[Run]" in out
    document = json.loads((isolated_cwd / "p.json").read_text(encoding="utf-8"))
    assert document["method"] == "numeric"
    assert len(document["data"]["t"]) == 3
    assert (isolated_cwd / "p.dat").is_file()

def test_cli_trajectory_exact_runaway_path(capsys, isolated_cwd):
    # |b| < A: Z escapes near t = 3, well after the requested window
    c0 = repr(dispersion_speed(0.8, 0.5) - 0.04)
    out, err, exit_code = run_capwave_cli(capsys, "trajectory", "--delta", "0.8", "--weber", "0.5", "--c0", c0,
                                          "--x0", "0.02", "--z0", "0.1", "--method", "exact", "--t-end", "1",
                                          "--dt-out", "0.05", "--format", "json", "-o", "runaway")
    assert exit_code == 0, err
    document = json.loads((isolated_cwd / "runaway.json").read_text(encoding="utf-8"))
    assert document["frame"] == "lab"
    assert document["truncated_at"] is None
    assert len(document["data"]["t"]) == 21

def test_cli_trajectory_numeric_blowup_is_numerical_failure(capsys, isolated_cwd):
    out, err, exit_code = run_capwave_cli(capsys, "trajectory", "--delta", "0.5", "--weber", "0.1", "--c0", "0.2",
                                          "--x0", "0.2", "--z0", "0.4", "--method", "numeric", "--t-end", "3",
                                          "--dt-out", "0.5", "-o", "gone")
    assert exit_code == EXIT_NUMERICAL_FAILURE
    assert not (isolated_cwd / "gone.csv").exists()

def test_cli_trajectory_is_deterministic(capsys, isolated_cwd):
    args = ["trajectory", "--c0", "0.3", "--t-end", "0.5", "--dt-out", "0.05"]
    run_capwave_cli(capsys, *args, "-o", "a")
    run_capwave_cli(capsys, *args, "-o", "b")
    assert (isolated_cwd / "a.csv").read_bytes() == (isolated_cwd / "b.csv").read_bytes()

def test_cli_trajectory_cli_overrides_config(capsys, isolated_cwd):
    (isolated_cwd / CONFIG_FILENAME).write_text('[tool.capwave]\nc0 = 0.25\nt_end = 0.3\ndt_out = 0.1\nformat = "json"\n',
                                               encoding="utf-8")
    out, err, exit_code = run_capwave_cli(capsys, "trajectory", "--format", "csv", "-o", "over")
    assert exit_code == 0, err
    assert len((isolated_cwd / "over.csv").read_text(encoding="utf-8").splitlines()) == 1 + 4
    assert not (isolated_cwd / "over.json").exists()

# --- `capwave verify` ---
def test_cli_verify_subset_with_report(capsys, isolated_cwd):
    out, err, exit_code = run_capwave_cli(capsys, "verify", "--only", "complete_k_at_zero", "--only", "config_round_trip",
                                          "--report", "report.json")
    assert exit_code == 0, err
    assert "All 2 checks passed" in out
    report = json.loads((isolated_cwd / "report.json").read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert [c["name"] for c in report["checks"]] == ["complete_k_at_zero", "config_round_trip"]

def test_cli_verify_unknown_check(capsys):
    out, err, exit_code = run_capwave_cli(capsys, "verify", "--only", "no_such_check")
    assert exit_code == EXIT_INVALID_INPUT
    assert "no_such_check" in err

def test_cli_verify_failure_exits_nonzero(capsys, isolated_cwd):
    def perturbed(only=None, verbose=False):
        return run_verify(perturbations={"complete_k_at_zero": 1.0}, only=only, verbose=verbose)

    with mock.patch("capwave_core.cli.run_verify", side_effect=perturbed):
        out, err, exit_code = run_capwave_cli(capsys, "verify", "--only", "complete_k_at_zero", "--report", "r.json")
    assert exit_code == EXIT_NUMERICAL_FAILURE
    assert "FAIL" in out
    assert "1 of 1 checks failed" in err
    assert json.loads((isolated_cwd / "r.json").read_text(encoding="utf-8"))["passed"] is False

# --- `capwave sweep` ---
def test_cli_sweep_summary(capsys, isolated_cwd):
    out, err, exit_code = run_capwave_cli(capsys, "sweep", "--delta", "0.5", "--delta", "1.0", "--c0", "0.2",
                                          "--t-end", "0.2", "--dt-out", "0.1", "-o", "s.json")
    assert exit_code == 0, err
    summary = json.loads((isolated_cwd / "s.json").read_text(encoding="utf-8"))
    assert [row["delta"] for row in summary["rows"]] == [0.5, 1.0]
    assert all(row["status"] == "ok" and row["samples"] == 3 for row in summary["rows"])
    assert "Sweep successful." in out

def test_cli_sweep_rejects_zero_workers(capsys):
    out, err, exit_code = run_capwave_cli(capsys, "sweep", "--workers", "0")
    assert exit_code == EXIT_INVALID_INPUT
