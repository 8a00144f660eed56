import csv
import io
import json
import subprocess
import sys

import pytest

from wavebranch.cli import main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_stream_closed_form(capsys):
    code, out, _ = run(["stream", "--s", "2"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["s", "d", "R", "F", "kappa", "rho0"]
    assert float(rows[0]["R"]) == pytest.approx(2.5, abs=1e-12)
    assert float(rows[0]["F"]) == pytest.approx(2.828427, abs=1e-6)


def test_stream_conjugates_and_sweep(capsys):
    code, out, _ = run(["stream", "--R", "2.5"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 2
    assert float(rows[0]["s"]) == pytest.approx(2**0.5 - 1, abs=1e-10)
    code, out, _ = run(["stream", "--omega", "[1, -2]"], capsys)
    assert code == 0 and len(out.splitlines()) == 65


def test_negative_tolerance_exit_1(capsys, tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("tol_quad = -1e-12\n")
    code, _, err = run(["stream", "--s", "2", "--config", str(p)], capsys)
    assert code == 1 and "tol_quad" in err


def test_numerical_failure_exit_2(capsys, tmp_path):
    code, _, err = run(["expansion", "--R", "1.2", "--out", str(tmp_path)], capsys)
    assert code == 2 and "NoSolutionError" in err
    rep = json.loads((tmp_path / "expansion_error.json").read_text())
    assert rep["error"] == "NoSolutionError"


def test_singular_input_exit_1(capsys):
    code, _, err = run(["stream", "--s", "0.5", "--omega", "[1, -2]"], capsys)
    assert code == 1 and "SingularInputError" in err


def test_dispersion_outputs(capsys, tmp_path):
    code, _, _ = run(["dispersion", "--R", "1.51", "--out", str(tmp_path), "--set", "n_tau=11"], capsys)
    assert code == 0
    rows = list(csv.reader(open(tmp_path / "dispersion.csv")))
    assert rows[0] == ["tau", "sigma"] and len(rows) == 12
    summary = json.loads((tmp_path / "dispersion_summary.json").read_text())
    assert set(summary) == {"tau_star", "Lambda0", "sigma0"}
    assert summary["sigma0"] < 0


def test_spectrum1d(capsys):
    code, out, _ = run(["spectrum1d", "--s", "2", "--k", "2"], capsys)
    d = json.loads(out)
    assert code == 0 and d["negative_count"] == 0 and d["coercive"] is True


def test_expansion_json(capsys):
    code, out, _ = run(["expansion", "--R", "1.51"], capsys)
    d = json.loads(out)
    assert code == 0 and d["lambda2"] < 0 and d["mu2"] > 0
    assert set(d) == {"tau_star", "c1", "lambda2", "mu2", "residual_diagnostics"}


def test_branch_reconstruct_spectrum2d_pipeline(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["branch", "--R", "1.51", "--steps", "3", "--damp", "0.005"]
    assert run(args + ["--out", str(a)], capsys)[0] == 0
    assert run(args + ["--out", str(b)], capsys)[0] == 0
    assert (a / "branch.json").read_bytes() == (b / "branch.json").read_bytes()
    code, _, _ = run(["reconstruct", "--branch-file", str(a / "branch.json"), "--index", "2",
                      "--out", str(a), "--set", "n_x=64"], capsys)
    assert code == 0
    code, out, _ = run(["spectrum2d", "--wave", str(a / "reconstruct.json"), "--k", "2",
                        "--set", "n_x=32", "--set", "n_y=32"], capsys)
    d = json.loads(out)
    assert code == 0 and d["negative_count"] == 1


def test_missing_inputs_exit_1(capsys):
    assert run(["spectrum2d"], capsys)[0] == 1
    assert run(["reconstruct", "--branch-file", "/nonexistent.json"], capsys)[0] == 1
    assert run(["branch"], capsys)[0] == 1
    assert run(["verify", "--models", "[nope]"], capsys)[0] == 1


def test_verify_zero(capsys):
    code, out, _ = run(["verify", "--models", "[zero]"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert rows and all(r["status"] in ("pass", "report") for r in rows)
    assert sum(r["status"] == "pass" for r in rows) >= 40


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "wavebranch.cli", "stream", "--s", "1"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("s,d,R,F,kappa,rho0")
