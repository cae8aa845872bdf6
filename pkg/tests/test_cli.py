"""Command-line interface: subcommands, config files, exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

from medcov import weiszfeld_median, write_csv
from medcov.cli import main


def run_cli(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def sample_csv(tmp_path, name, rows, seed=0):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((rows, 3))
    path = tmp_path / name
    write_csv(path, data)
    return str(path), data


# ---------------------------------------------------------------------------
# simulate

def test_simulate_writes_csv_to_stdout(capsys):
    rc, out, _ = run_cli(capsys, "simulate", "--d", "4", "--n", "7", "--seed", "3")
    assert rc == 0
    lines = out.splitlines()
    assert len(lines) == 7
    assert all(len(line.split(",")) == 4 for line in lines)


def test_simulate_header_and_determinism(capsys):
    args = ("simulate", "--d", "3", "--n", "5", "--seed", "1", "--header")
    rc1, out1, _ = run_cli(capsys, *args)
    rc2, out2, _ = run_cli(capsys, *args)
    assert rc1 == rc2 == 0
    assert out1 == out2
    assert out1.splitlines()[0] == "x1,x2,x3"


def test_simulate_rejects_rate_without_law(capsys):
    rc, _, err = run_cli(capsys, "simulate", "--d", "4", "--n", "5",
                         "--delta", "0.5")
    assert rc == 2
    assert "config error" in err


def test_simulate_to_file(tmp_path, capsys):
    out = tmp_path / "sample.csv"
    rc, _, _ = run_cli(capsys, "simulate", "--d", "2", "--n", "10",
                       "--delta", "1.0", "--scenario", "reverse_brownian",
                       "--out", str(out))
    assert rc == 0
    rows = [line.split(",") for line in out.read_text().splitlines()]
    assert len(rows) == 10
    assert all(float(cells[-1]) == 0.0 for cells in rows)


# ---------------------------------------------------------------------------
# fit-stream

def test_fit_stream_reports_and_snapshots(tmp_path, capsys):
    path, _ = sample_csv(tmp_path, "data.csv", 40)
    snap = tmp_path / "state.json"
    rc, out, _ = run_cli(capsys, "fit-stream", "--in", path, "--q", "2",
                         "--out", str(snap))
    assert rc == 0
    report = json.loads(out)
    assert report["rows"] == 40
    assert len(report["median"]) == 3
    assert snap.exists()


def test_fit_stream_requires_input(capsys):
    rc, _, err = run_cli(capsys, "fit-stream")
    assert rc == 2
    assert "config error" in err


def test_fit_stream_missing_file_is_data_error(tmp_path, capsys):
    rc, _, err = run_cli(capsys, "fit-stream", "--in", str(tmp_path / "nope.csv"))
    assert rc == 3


def test_fit_stream_ragged_file_is_data_error(tmp_path, capsys):
    path = tmp_path / "ragged.csv"
    path.write_text("1,2\n3\n")
    rc, _, err = run_cli(capsys, "fit-stream", "--in", str(path))
    assert rc == 3
    assert "line 2" in err


def test_fit_stream_resume_matches_single_pass(tmp_path, capsys):
    rng = np.random.default_rng(5)
    data = rng.standard_normal((30, 2))
    full = tmp_path / "full.csv"
    head = tmp_path / "head.csv"
    tail = tmp_path / "tail.csv"
    write_csv(full, data)
    write_csv(head, data[:11])
    write_csv(tail, data[11:])

    snap_full = tmp_path / "full.json"
    snap_head = tmp_path / "head.json"
    snap_resumed = tmp_path / "resumed.json"
    assert run_cli(capsys, "fit-stream", "--in", str(full), "--q", "1",
                   "--out", str(snap_full))[0] == 0
    assert run_cli(capsys, "fit-stream", "--in", str(head), "--q", "1",
                   "--out", str(snap_head))[0] == 0
    assert run_cli(capsys, "fit-stream", "--in", str(tail),
                   "--resume", str(snap_head), "--out", str(snap_resumed))[0] == 0
    assert snap_resumed.read_bytes() == snap_full.read_bytes()


# ---------------------------------------------------------------------------
# fit-weiszfeld

def test_fit_weiszfeld_outputs_batch_estimates(tmp_path, capsys):
    path, data = sample_csv(tmp_path, "batch.csv", 25, seed=2)
    rc, out, _ = run_cli(capsys, "fit-weiszfeld", "--in", path, "--q", "2")
    assert rc == 0
    result = json.loads(out)
    assert result["n"] == 25
    np.testing.assert_allclose(result["median"], weiszfeld_median(data), atol=1e-8)
    assert len(result["eigenvalues"]) == 2
    assert result["eigenvalues"][0] >= result["eigenvalues"][1]


def test_fit_weiszfeld_iteration_cap_is_numerical_failure(tmp_path, capsys):
    path, _ = sample_csv(tmp_path, "batch.csv", 25, seed=3)
    rc, _, err = run_cli(capsys, "fit-weiszfeld", "--in", path,
                         "--max-iter", "1")
    assert rc == 4
    assert "numerical failure" in err


# ---------------------------------------------------------------------------
# bench and curve

def test_bench_prints_report(capsys):
    rc, out, _ = run_cli(capsys, "bench", "--d", "5", "--n", "60",
                         "--reps", "2", "--q", "1", "--estimators", "pca,mcm_r",
                         "--seed", "4")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0].startswith("estimator,scenario,delta,d,n,q,reps,excluded")
    assert len(lines) == 3
    assert lines[1].startswith("pca,")
    assert lines[2].startswith("mcm_r,")


def test_bench_rejects_unknown_estimator(capsys):
    rc, _, err = run_cli(capsys, "bench", "--estimators", "pca,bogus")
    assert rc == 2
    assert "bogus" in err


def test_bench_rejects_bad_worker_env(monkeypatch, capsys):
    monkeypatch.setenv("MEDCOV_MAX_WORKERS", "many")
    rc, _, err = run_cli(capsys, "bench", "--d", "4", "--n", "30",
                         "--reps", "2", "--q", "1", "--estimators", "pca")
    assert rc == 2


def test_curve_requires_checkpoints(capsys):
    rc, _, err = run_cli(capsys, "curve", "--d", "4", "--n", "50", "--reps", "2")
    assert rc == 2
    assert "checkpoints" in err


def test_curve_rejects_checkpoint_beyond_stream(capsys):
    rc, _, _ = run_cli(capsys, "curve", "--d", "4", "--n", "50", "--reps", "2",
                       "--checkpoints", "40,80")
    assert rc == 2


def test_curve_prints_table(capsys):
    rc, out, _ = run_cli(capsys, "curve", "--d", "5", "--n", "80", "--reps", "2",
                         "--q", "1", "--checkpoints", "40,80", "--seed", "5")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "checkpoint,series,mean_R,reps"
    assert len(lines) == 1 + 2 * 4  # two checkpoints, four series


# ---------------------------------------------------------------------------
# config files

def test_config_file_with_flag_overrides(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# desk-scale run\nd = 6\nn = 40\nreps = 2\nq = 1\n"
                   "estimators = pca\n")
    out = tmp_path / "report.csv"
    rc, _, _ = run_cli(capsys, "bench", "--config", str(cfg),
                       "--reps", "3", "--out", str(out))
    assert rc == 0
    meta = json.loads((tmp_path / "report.csv.meta.json").read_text())
    assert meta["config"]["scenario"]["d"] == 6
    assert meta["config"]["replications"] == 3  # flag wins over file
    assert out.read_text().count("\n") == 2  # header + one estimator


def test_config_file_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("dee = 6\n")
    rc, _, err = run_cli(capsys, "bench", "--config", str(cfg))
    assert rc == 2


def test_config_file_rejects_malformed_line(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("d 6\n")
    rc, _, err = run_cli(capsys, "bench", "--config", str(cfg))
    assert rc == 2


def test_config_file_in_alias(tmp_path, capsys):
    path, _ = sample_csv(tmp_path, "data.csv", 12)
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"in = {path}\nq = 1\n")
    rc, out, _ = run_cli(capsys, "fit-stream", "--config", str(cfg))
    assert rc == 0
    assert json.loads(out)["rows"] == 12


# ---------------------------------------------------------------------------
# installed entry point

def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "medcov.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("simulate", "fit-stream", "fit-weiszfeld", "bench", "curve"):
        assert cmd in proc.stdout
