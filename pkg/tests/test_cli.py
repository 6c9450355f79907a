from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from shearlet_tl.cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, run
from shearlet_tl.frame import FrequencyGrid
from shearlet_tl.transform import load_signal, random_signal, save_signal


@pytest.fixture
def signal_file(tmp_path):
    p = tmp_path / "f.grid"
    save_signal(random_signal(FrequencyGrid(32), np.random.default_rng(0), 4), p)
    return p


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_frame_check_example(capsys):
    assert run(["frame", "check", "--system", "smooth", "--grid", "256", "--jmax", "4"]) == EXIT_OK
    d = _json(capsys)
    assert d["seed"] == 42 and d["statement"] and d["passed"]
    assert d["measured"]["max_deviation"] == 1.0


def test_frame_check_cone(capsys):
    assert run(["frame", "check", "--system", "cone", "--grid", "64"]) == EXIT_OK


def test_overlap(capsys):
    assert run(["frame", "overlap", "--grid", "64", "--jmax", "3"]) == EXIT_OK
    assert _json(capsys)["measured"]["max_count"] <= 11


@pytest.mark.parametrize("system", ["smooth", "cone"])
def test_roundtrip(capsys, system):
    assert run(["transform", "roundtrip", "--grid", "32", "--system", system, "--seed", "7"]) == EXIT_OK
    d = _json(capsys)
    assert d["measured"]["relative_error"] < 1e-12 and d["seed"] == 7


def test_reports_are_deterministic(capsys):
    run(["transform", "roundtrip", "--grid", "32"])
    a = capsys.readouterr().out
    run(["transform", "roundtrip", "--grid", "32"])
    assert capsys.readouterr().out == a


def test_failed_check_still_writes_report(tmp_path):
    out = tmp_path / "r.json"
    assert run(["experiment", "lemma71", "-o", str(out)]) == EXIT_FAILED
    d = json.loads(out.read_text())
    assert d["passed"] is False and d["audit"] == "lemma71"


def test_csv_output(capsys):
    run(["experiment", "lemma71", "--format", "csv"])
    assert capsys.readouterr().out.splitlines()[0] == "case_id,j,l,measured,bound,ratio"


def test_experiment_params(capsys):
    assert run(["experiment", "embed", "--param", "direction=dyadic-to-ab", "--param", "alpha1=3.5",
                "--param", "alpha2=0", "--param", "lam=2.5"]) == EXIT_OK


@pytest.mark.parametrize("argv", [
    ["frame", "check", "--grid", "100"],
    ["frame", "check", "--grid", "64", "--jmax", "9"],
    ["frame", "bogus"],
    [],
    ["experiment", "orth", "--param", "nope=1"],
    ["experiment", "embed", "--param", "alpha1=3", "--param", "alpha2=0.5"],
    ["transform", "roundtrip", "--tol", "-1"],
    ["norm", "--p", "0", "-i", "x"],
    ["norm"],
])
def test_invalid_input(argv, capsys):
    assert run(argv) == EXIT_INVALID


def test_config_overrides_and_unknown_keys(tmp_path, capsys):
    good = tmp_path / "c.json"
    good.write_text(json.dumps({"grid": 32, "seed": 5}))
    assert run(["transform", "roundtrip", "--config", str(good), "--grid", "64"]) == EXIT_OK
    d = _json(capsys)
    assert d["params"]["grid"] == 32 and d["seed"] == 5
    bad = tmp_path / "b.json"
    bad.write_text(json.dumps({"gird": 32}))
    assert run(["transform", "roundtrip", "--config", str(bad)]) == EXIT_INVALID
    assert "gird" in capsys.readouterr().err


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("SHEARLET_THREADS", "0")
    assert run(["frame", "check", "--grid", "16"]) == EXIT_INVALID
    monkeypatch.setenv("SHEARLET_THREADS", "2")
    assert run(["frame", "check", "--grid", "16"]) == EXIT_OK
    assert _json(capsys)["threads"] == 2


def test_analyze_synthesize_pipeline(tmp_path, signal_file):
    coeffs, back = tmp_path / "c.json", tmp_path / "g.grid"
    assert run(["transform", "analyze", "-i", str(signal_file), "--jmax", "3", "-o", str(coeffs)]) == EXIT_OK
    assert run(["transform", "synthesize", "-i", str(coeffs), "--grid", "32", "--jmax", "3", "-o", str(back)]) == EXIT_OK
    a, b = load_signal(signal_file), load_signal(back)
    assert (a - b).norm2() <= 1e-12 * a.norm2()


def test_norm_function_and_sequence(tmp_path, signal_file, capsys):
    assert run(["norm", "-i", str(signal_file), "--alpha", "0.5"]) == EXIT_OK
    m = _json(capsys)["measured"]
    assert set(m) == {"family", "alpha", "p", "q", "value", "grid", "j_max"} and m["value"] > 0
    coeffs = tmp_path / "c.json"
    run(["transform", "analyze", "-i", str(signal_file), "--jmax", "2", "-o", str(coeffs)])
    assert run(["norm", "-i", str(coeffs), "--coefficients", "--grid", "32", "--jmax", "2"]) == EXIT_OK
    assert _json(capsys)["measured"]["value"] > 0


def test_truncated_input_is_rejected(tmp_path, signal_file, capsys):
    bad = tmp_path / "t.grid"
    bad.write_bytes(signal_file.read_bytes()[:-3])
    assert run(["norm", "-i", str(bad)]) == EXIT_INVALID
    assert "truncated" in capsys.readouterr().err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "shearlet_tl", "experiment", "lemma71"], capture_output=True, text=True)
    assert r.returncode == EXIT_FAILED
    assert json.loads(r.stdout)["audit"] == "lemma71"
