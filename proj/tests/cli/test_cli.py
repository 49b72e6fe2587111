# Copyright (c) 2026 rejsamp contributors
# SPDX-License-Identifier: Apache-2.0
"""End-to-end checks of the command line tool (paths come from ctest env)."""

import csv
import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("REJSAMP_CLI")
PLUGIN = os.environ.get("REJSAMP_PLUGIN")

pytestmark = pytest.mark.skipif(CLI is None, reason="REJSAMP_CLI not set")


def run_cli(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def test_usage_error_on_bad_T(tmp_path):
    res = run_cli("run", "--family", "sinusoid", "--T", "0", "--out", str(tmp_path))
    assert res.returncode == 2


def test_unknown_flag_is_usage_error(tmp_path):
    res = run_cli("run", "--bogus-flag", "1")
    assert res.returncode == 2


def test_run_writes_report_and_samples(tmp_path):
    res = run_cli(
        "run", "--family", "sinusoid", "--d", "1", "--T", "400", "--seed", "3",
        "--out", str(tmp_path),
    )
    assert res.returncode == 0, res.stderr
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["audit"]["pass"] is True
    assert report["T"] == 400
    assert report["target"]["family"] == "sinusoid"
    assert report["distributional_test"]["p_value"] > 0.01
    rows = (tmp_path / "samples.csv").read_text().strip().splitlines()
    assert len(rows) == 400
    assert all(0.0 < float(r) < 1.0 for r in rows)


def test_f64le_samples_format(tmp_path):
    res = run_cli(
        "run", "--family", "sinusoid", "--d", "2", "--T", "100", "--seed", "5",
        "--out", str(tmp_path), "--samples-format", "f64le", "--no-test",
    )
    assert res.returncode == 0, res.stderr
    raw = (tmp_path / "samples.f64le").read_bytes()
    assert len(raw) == 100 * 2 * 8


def test_determinism_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        res = run_cli(
            "run", "--family", "sinusoid", "--d", "1", "--T", "300", "--seed", "9",
            "--out", str(out), "--no-test",
        )
        assert res.returncode == 0, res.stderr
    assert (a / "samples.csv").read_bytes() == (b / "samples.csv").read_bytes()

    def strip_wall(p: Path):
        rep = json.loads((p / "report.json").read_text())
        rep.pop("wall_time_s")
        return json.dumps(rep, sort_keys=True)

    assert strip_wall(a) == strip_wall(b)


def test_constants_file_roundtrip(tmp_path):
    constants = tmp_path / "constants.json"
    constants.write_text('{"n_base": 250}')
    res = run_cli(
        "run", "--family", "sinusoid", "--T", "200", "--seed", "1",
        "--out", str(tmp_path), "--constants-file", str(constants), "--no-test",
    )
    assert res.returncode == 0, res.stderr
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["config"]["n_base"] == 250

    constants.write_text('{"no_such_constant": 1}')
    res = run_cli(
        "run", "--family", "sinusoid", "--T", "200", "--out", str(tmp_path),
        "--constants-file", str(constants),
    )
    assert res.returncode == 2


def test_bench_csv_schema(tmp_path):
    res = run_cli(
        "bench", "--suite", "clutter", "--T", "300", "--runs", "2", "--seed", "2",
        "--out", str(tmp_path), "--no-test",
    )
    assert res.returncode == 0, res.stderr
    with open(tmp_path / "bench.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4  # 2 cells x 2 runs
    for row in rows:
        assert row["family"] == "clutter"
        assert row["ok"] == "1"
        assert 0.0 < float(row["acceptance_rate"]) <= 1.0
        assert row["audit_pass"] == "1"
        assert int(row["f_evals"]) > 0
    seeds = {(r["d"], r["seed"]) for r in rows}
    assert ("1", "2") in seeds and ("1", "3") in seeds


def test_ablate_identity_matches_run(tmp_path):
    out_run = tmp_path / "plain"
    res = run_cli(
        "run", "--family", "peakiness", "--a", "4", "--T", "300", "--seed", "7",
        "--out", str(out_run), "--no-test",
    )
    assert res.returncode == 0, res.stderr

    out_ab = tmp_path / "grid"
    res = run_cli(
        "ablate", "--a", "4", "--T", "300", "--seed", "7", "--factors", "1.0",
        "--out", str(out_ab),
    )
    assert res.returncode == 0, res.stderr
    with open(out_ab / "ablate.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1  # single identity cell

    def normalized(p: Path):
        rep = json.loads((p / "report.json").read_text())
        rep.pop("wall_time_s")
        return json.dumps(rep, sort_keys=True)

    # Identity factors reproduce the plain run's report exactly.
    assert normalized(out_run) == normalized(out_ab / "cell000")


@pytest.mark.skipif(PLUGIN is None, reason="REJSAMP_PLUGIN not set")
def test_plugin_target(tmp_path):
    res = run_cli(
        "run", "--target-plugin", PLUGIN, "--T", "400", "--seed", "1",
        "--out", str(tmp_path),
    )
    assert res.returncode == 0, res.stderr
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["audit"]["pass"] is True
    rows = (tmp_path / "samples.csv").read_text().strip().splitlines()
    assert len(rows) == 400
    assert all(float(r) > 0.0 for r in rows)
