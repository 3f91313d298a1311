import json

import pytest

from resonance_lab.cli import main


def run(args):
    return main(args)


def test_lambda_guard(tmp_path):
    assert run(["delta", "--lambda", "1.9", "--out", str(tmp_path)]) == 1


def test_strip_guard(tmp_path):
    code = run(["zeta-eval", "--lambda", "3", "--s", "5.0", "--out", str(tmp_path)])
    assert code == 1


def test_unknown_suite():
    # argparse rejects the choice; main returns 1
    assert run(["verify", "--suite", "nonsense", "--lambda", "3"]) == 1


def test_delta_command(tmp_path):
    out = tmp_path / "d"
    assert run(["delta", "--lambda", "3", "--out", str(out)]) == 0
    payload = json.loads((out / "delta.json").read_text())
    assert payload["gap"] < 1e-4
    assert 0.5 < payload["delta_matrix"] < 1.0
    assert (out / "delta.png").exists()
    man = json.loads((out / "delta_manifest.json").read_text())
    assert man["schema_version"] == 1
    assert man["seed"] == 0


def test_geodesics_command(tmp_path):
    out = tmp_path / "g"
    assert run(["geodesics", "--lambda", "3", "--max-n", "4", "--max-exp", "5",
                "--out", str(out)]) == 0
    lines = (out / "geodesics.csv").read_text().strip().splitlines()
    assert lines[0] == "n,exponent_tuple,trace,length,primitive,weight"
    first = lines[1].split(",")
    assert float(first[3]) == pytest.approx(1.9248473, abs=1e-6)
    assert (out / "geodesics.png").exists()


def test_zeta_eval_command(tmp_path):
    out = tmp_path / "z"
    assert run(["zeta-eval", "--lambda", "3", "--s", "2.0", "--no-plot",
                "--out", str(out)]) == 0
    payload = json.loads((out / "zeta_eval.json").read_text())
    assert payload["gap"] < 1e-4


def test_resonances_command_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["resonances", "--lambda", "3", "--re", "0.55:0.95",
            "--im", "-0.01:0.01", "--degree", "32", "--grid", "20x6",
            "--seed", "9", "--no-plot"]
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert (a / "resonances.csv").read_bytes() == (b / "resonances.csv").read_bytes()
    assert (a / "resonances_manifest.json").read_bytes() == (
        b / "resonances_manifest.json").read_bytes()
    rows = (a / "resonances.csv").read_text().strip().splitlines()
    assert len(rows) == 2  # header plus the real zero
    assert rows[1].split(",")[4] == "even"


def test_thread_cap_does_not_change_bytes(tmp_path, monkeypatch):
    args = ["resonances", "--lambda", "3", "--re", "0.6:0.9",
            "--im", "-0.01:0.01", "--degree", "24", "--grid", "12x5",
            "--seed", "3", "--no-plot"]
    monkeypatch.delenv("RESONANCE_LAB_THREADS", raising=False)
    assert run(args + ["--out", str(tmp_path / "serial")]) == 0
    monkeypatch.setenv("RESONANCE_LAB_THREADS", "3")
    assert run(args + ["--out", str(tmp_path / "threaded")]) == 0
    a = (tmp_path / "serial" / "resonances.csv").read_bytes()
    b = (tmp_path / "threaded" / "resonances.csv").read_bytes()
    assert a == b


def test_verify_flow_command(tmp_path):
    out = tmp_path / "v"
    assert run(["verify", "--suite", "flow", "--lambda", "4",
                "--out", str(out)]) == 0
    rep = json.loads((out / "verify_flow.json").read_text())
    assert rep["pass"]


def test_periodfn_command(tmp_path):
    out = tmp_path / "p"
    assert run(["periodfn", "--lambda", "3", "--samples", "11",
                "--out", str(out)]) == 0
    man = json.loads((out / "periodfn_manifest.json").read_text())
    assert man["classification"] == "resonant-noncuspidal"
    assert man["parity"] == "even"
    assert man["slow_residual"] < 1e-6
    lines = (out / "periodfn.csv").read_text().strip().splitlines()
    assert len(lines) == 12
    assert (out / "periodfn.png").exists()
