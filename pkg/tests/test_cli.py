import csv
import json
import subprocess
import sys

import pytest

from iglab.cli import CSV_COLUMNS, main
from iglab.theory import (
    ModelParams,
    alpha_from_params,
    edge_prob_model,
    predicted_limit_prob,
    solve_critical,
)


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_edge_prob_exact_output(capsys):
    assert run_cli("edge-prob", "-K", 3, "-P", 10, "-d", 2) == 0
    out = capsys.readouterr().out
    assert "11/60" in out
    assert "0.183333333" in out


def test_edge_prob_respects_thinning(capsys):
    assert run_cli("edge-prob", "-K", 3, "-P", 10, "-d", 2,
                   "-f", 0.5, "-g", 0.5) == 0
    out = capsys.readouterr().out
    t = 0.25 * 11 / 60
    assert f"{t:.9g}" in out


def test_validation_exit_code(capsys):
    assert run_cli("edge-prob", "-K", 11, "-P", 10, "-d", 2) == 2
    assert "error" in capsys.readouterr().err


def test_predict_output(capsys):
    assert run_cli("predict", "-n", 1000, "-K", 36, "-P", 10000, "-d", 2,
                   "-g", 0.95) == 0
    out = capsys.readouterr().out
    params = ModelParams(n=1000, K=36, P=10000, d=2, f=1.0, g=0.95)
    alpha = alpha_from_params(params, 0)
    assert f"{alpha:.9g}" in out
    assert f"{predicted_limit_prob(alpha, 0):.9g}" in out


def test_critical_output_matches_solver(capsys):
    assert run_cli("critical", "--axis", "g", "-n", 1000, "-K", 36,
                   "-P", 10000, "-d", 2) == 0
    out = capsys.readouterr().out
    res = solve_critical("g", ModelParams(n=1000, K=36, P=10000, d=2,
                                          f=1.0, g=1.0), 0)
    assert f"{res.value:.9g}" in out
    assert "INFEASIBLE" not in out


def test_critical_reports_infeasible(capsys):
    # n too small for any g in (0, 1] to reach the connectivity threshold
    assert run_cli("critical", "--axis", "g", "-n", 5, "-K", 2,
                   "-P", 100, "-d", 2) == 0
    assert "INFEASIBLE" in capsys.readouterr().out


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_simulate_writes_csv_and_manifest(tmp_path, capsys):
    out = tmp_path / "run.csv"
    assert run_cli("simulate", "-n", 50, "-K", 3, "-P", 12, "-d", 1,
                   "-g", 0.8, "--trials", 25, "--seed", 9,
                   "--workers", 1, "--out", out) == 0
    text = out.read_text()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    rows = _read_csv(out)
    assert len(rows) == 1
    row = rows[0]
    assert row["n"] == "50" and row["trials"] == "25" and row["seed"] == "9"
    assert 0.0 <= float(row["empirical_prob"]) <= 1.0
    assert float(row["ci_low"]) <= float(row["empirical_prob"]) <= float(row["ci_high"])
    manifest = json.loads((tmp_path / "run.csv.manifest.json").read_text())
    assert manifest["config"]["trials"] == 25
    assert list(manifest["outputs"]) == ["run.csv"]
    assert manifest["outputs"]["run.csv"].startswith("sha256:")


def test_sweep_rows_recompute_predictions(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert run_cli("sweep", "-n", 200, "-K", 4, "-P", 30, "-d", 1,
                   "--axis", "g", "--values", "0.4,0.7,1.0",
                   "--trials", 10, "--seed", 1, "--workers", 1,
                   "--out", out) == 0
    rows = _read_csv(out)
    assert [r["sweep_value"] for r in rows] == ["0.4", "0.7", "1"]
    for r in rows:
        params = ModelParams(n=200, K=4, P=30, d=1, f=1.0, g=float(r["g"]))
        alpha = alpha_from_params(params, 0)
        assert float(r["alpha"]) == pytest.approx(alpha, rel=1e-8)
        assert float(r["predicted_limit"]) == pytest.approx(
            predicted_limit_prob(alpha, 0), rel=1e-8)
        assert r["sweep_param"] == "g"
        assert r["critical_value"] == rows[0]["critical_value"]


def test_sweep_rerun_is_byte_identical(tmp_path):
    args = ["sweep", "-n", 60, "-K", 3, "-P", 15, "-d", 1,
            "--axis", "g", "--values", "0.5,0.9",
            "--trials", 16, "--seed", 4]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(*args, "--workers", 1, "--out", a) == 0
    assert run_cli(*args, "--workers", 3, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "# resilience run\n"
        "n = 40\nK = 3\nP = 12\nd = 1\ng = 0.7\n"
        "trials = 12\nseed = 2\n"
        "[sweep]\naxis = g\nvalues = 0.5,0.8\n"
    )
    out = tmp_path / "from_cfg.csv"
    assert run_cli("sweep", "--config", cfg, "--trials", 8,
                   "--workers", 1, "--out", out) == 0
    rows = _read_csv(out)
    assert len(rows) == 2
    assert all(r["trials"] == "8" for r in rows)  # flag wins over file
    assert all(r["n"] == "40" for r in rows)


def test_config_file_rejects_garbage(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("this is not key value\n")
    out = tmp_path / "x.csv"
    assert run_cli("simulate", "--config", cfg, "--out", out) == 2


def test_missing_config_file_is_io_error(tmp_path, capsys):
    assert run_cli("simulate", "--config", tmp_path / "nope.cfg",
                   "--out", tmp_path / "x.csv") == 3


def test_verify_gap_and_coupling(capsys):
    assert run_cli("verify", "gap", "-n", 30, "-K", 3, "-P", 12, "-d", 1,
                   "-g", 0.6, "-k", 2, "--trials", 40) == 0
    out = capsys.readouterr().out
    assert "frequency" in out
    assert run_cli("verify", "coupling", "-n", 200, "-K", 50, "-P", 500,
                   "-d", 2, "--trials", 5) == 0
    out = capsys.readouterr().out
    assert "validity rate" in out
    payload = json.loads(out[out.index("{"):])
    assert payload["trials"] == 5


def test_verify_degree_and_dominance(capsys):
    assert run_cli("verify", "degree", "-n", 80, "-K", 4, "-P", 25, "-d", 1,
                   "-g", 0.9, "--trials", 30) == 0
    out = capsys.readouterr().out
    assert "h=0" in out and "TV=" in out
    assert run_cli("verify", "dominance", "-n", 50, "-K", 3, "-P", 15,
                   "-d", 1, "-g", 0.8, "-k", 1, "--trials", 40) == 0
    out = capsys.readouterr().out
    assert "holds = True" in out


def test_dump_graph_stdout_and_file(tmp_path, capsys):
    assert run_cli("dump-graph", "-n", 8, "-K", 3, "-P", 6, "-d", 1,
                   "--seed", 5) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "n=8"
    path = tmp_path / "g.txt"
    assert run_cli("dump-graph", "-n", 8, "-K", 3, "-P", 6, "-d", 1,
                   "--seed", 5, "--out", path) == 0
    assert path.read_text() == out


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "iglab.cli", "edge-prob",
         "-K", "3", "-P", "10", "-d", "2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "11/60" in proc.stdout
