import json
import subprocess
import sys

import pytest

from schattenlab import cli


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "schattenlab.cli", *args],
        capture_output=True,
        text=True,
    )
    return proc


def data_lines(path):
    """All records after the header (the only line carrying a timestamp)."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    return [ln for ln in lines if '"record": "header"' not in ln and not ln.startswith("#")]


def test_gamma_value(tmp_path):
    out = tmp_path / "g.jsonl"
    proc = run_cli("gamma", "--d", "4", "--p", "2", "--q", "2", "--out", str(out))
    assert proc.returncode == cli.EXIT_OK
    assert "0.333333333333" in proc.stderr
    rec = json.loads(data_lines(out)[0])
    assert rec["ratio"] == pytest.approx(1.0 / 3.0, rel=1e-10)


def test_verify_gamma_suite_exit_zero(tmp_path):
    out = tmp_path / "v.jsonl"
    proc = run_cli("verify", "--suite", "gamma", "--out", str(out))
    assert proc.returncode == cli.EXIT_OK
    recs = [json.loads(ln) for ln in data_lines(out)]
    assert {r["claim_id"] for r in recs} == {
        "gamma-gap-positive",
        "gamma-gap-sandwich",
        "gamma-approximant-band",
    }
    assert all(r["passed"] for r in recs)
    assert proc.stderr.count("PASS") == 3


def test_estimate_sigma_record(tmp_path):
    out = tmp_path / "s.jsonl"
    proc = run_cli(
        "estimate", "sigma", "--field", "R", "--subspace", "full", "--n", "2",
        "--p", "2", "--samples", "50000", "--out", str(out),
    )
    assert proc.returncode == cli.EXIT_OK
    rec = json.loads(data_lines(out)[0])
    assert rec["record"] == "sigma"
    assert abs(rec["sigma_sq"] - 0.5) < 0.05


def test_estimate_moment_quadrature(tmp_path):
    out = tmp_path / "m.jsonl"
    proc = run_cli(
        "estimate", "moment", "--ensemble", "2,1,0", "--n", "2", "--p", "2",
        "--functional", "x1_sq", "--method", "quadrature", "--out", str(out),
    )
    assert proc.returncode == cli.EXIT_OK
    rec = json.loads(data_lines(out)[0])
    assert rec["method"] == "quadrature"


def test_oracle_failure_exit_code(tmp_path):
    # odd-a family at odd p has no smooth quadrature route
    proc = run_cli(
        "estimate", "moment", "--ensemble", "1,1,0", "--n", "2", "--p", "1",
        "--functional", "one", "--method", "quadrature", "--out", str(tmp_path / "x.jsonl"),
    )
    assert proc.returncode == cli.EXIT_ORACLE


def test_sample_replay_byte_identical(tmp_path):
    args = ("sample", "gas", "--ensemble", "2,1,0", "--n", "2", "--p", "inf",
            "--samples", "200", "--seed", "11")
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run_cli(*args, "--out", str(out1)).returncode == cli.EXIT_OK
    assert run_cli(*args, "--out", str(out2)).returncode == cli.EXIT_OK
    assert data_lines(out1) == data_lines(out2)
    assert len(data_lines(out1)) == 200


def test_sample_csv_format(tmp_path):
    out = tmp_path / "c.csv"
    proc = run_cli("sample", "gas", "--ensemble", "2,1,0", "--n", "3", "--p", "2",
                   "--samples", "50", "--format", "csv", "--out", str(out))
    assert proc.returncode == cli.EXIT_OK
    lines = data_lines(out)
    assert lines[0] == "x0,x1,x2"
    assert len(lines) == 51


def test_sweep_emits_grid(tmp_path):
    out = tmp_path / "w.jsonl"
    proc = run_cli("sweep", "--ensembles", "2,1,0", "--n-list", "2", "--p-list",
                   "2,inf", "--samples", "4000", "--out", str(out))
    assert proc.returncode == cli.EXIT_OK
    recs = [json.loads(ln) for ln in data_lines(out)]
    assert [r["p"] for r in recs] == [2.0, "inf"]
    assert all("combination" in r for r in recs)


def test_verify_narrowed_identities(tmp_path):
    out = tmp_path / "n.jsonl"
    proc = run_cli("verify", "--suite", "identities", "--ensemble", "2,1,0",
                   "--n", "2", "--p", "2", "--out", str(out))
    assert proc.returncode == cli.EXIT_OK
    recs = [json.loads(ln) for ln in data_lines(out)]
    assert len(recs) == 3
    assert all(r["passed"] for r in recs)
    assert all("(2,1,0),n=2,p=2" in r["claim_id"] for r in recs)


def test_usage_errors():
    assert run_cli("verify", "--suite", "wat").returncode == cli.EXIT_USAGE
    assert run_cli("estimate", "sigma", "--p", "0.3").returncode == cli.EXIT_USAGE
    assert run_cli().returncode == cli.EXIT_USAGE


def test_header_carries_config(tmp_path):
    out = tmp_path / "h.jsonl"
    run_cli("gamma", "--d", "9", "--p", "3", "--q", "2", "--seed", "5", "--out", str(out))
    with open(out, encoding="utf-8") as fh:
        head = json.loads(fh.readline())
    assert head["record"] == "header"
    assert head["config"]["seed"] == 5
    assert head["config"]["options"]["d"] == 9.0
    assert head["schema"] == 1
