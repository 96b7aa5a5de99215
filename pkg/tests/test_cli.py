import json
import subprocess
import sys

import numpy as np
import pytest

from rdmbounds.cli import main
from rdmbounds.integrals import builtin_model, write_fcidump


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exact_text_and_json(capsys):
    code, out, _ = run_cli(capsys, "exact", "--model", "hubbard_dimer")
    assert code == 0
    assert "E = -0.828427124746" in out
    code, out, _ = run_cli(
        capsys, "exact", "--model", "hubbard_dimer", "--lambda", "-1", "--json"
    )
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["e"] - (-4.82842712474619)) < 1e-10
    assert payload["degeneracy"] == 1


def test_exact_lambda_zero(capsys):
    code, out, _ = run_cli(capsys, "exact", "--model", "hubbard_dimer", "--lambda", "0")
    assert code == 0
    assert "E = -2" in out


def test_exact_flag_case_aliases(capsys):
    code, out, _ = run_cli(
        capsys, "exact", "--model", "hubbard_dimer", "--t", "1", "--U", "4",
        "--lambda", "1",
    )
    assert code == 0
    assert "-0.828427" in out


def test_bounds_from_inline_occupations(capsys):
    code, out, _ = run_cli(
        capsys, "bounds", "--model", "model_a", "--occupations", "1,1"
    )
    assert code == 0
    assert "lb = 0.8" in out
    assert "ub = 1.1" in out


def test_bounds_gamma_file_and_witness_dump(capsys, tmp_path):
    gfile = tmp_path / "gamma.txt"
    gfile.write_text("occupations = [1.0, 1.0]\n")
    wfile = tmp_path / "witness.txt"
    code, out, _ = run_cli(
        capsys, "bounds", "--model", "model_a", "--gamma", str(gfile),
        "--dump-witness", str(wfile), "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["lb"] - 0.8) < 1e-5
    assert abs(payload["ub"] - 1.1) < 1e-5
    text = wfile.read_text()
    assert "lower_potential" in text and "upper_potential" in text


def test_bounds_rejects_bad_occupations(capsys):
    code, _, err = run_cli(
        capsys, "bounds", "--model", "model_a", "--occupations", "2.5,-0.5"
    )
    assert code == 2
    assert "admissible" in err or "Coleman" in err or "occupation" in err


def test_bounds_matrix_gamma(capsys, tmp_path):
    gfile = tmp_path / "gamma.txt"
    gfile.write_text("matrix = [[1.2, 0.1], [0.1, 0.8]]\n")
    code, out, _ = run_cli(capsys, "bounds", "--model", "model_a", "--gamma", str(gfile))
    assert code == 0
    assert "lb = " in out and "ub = " in out


def test_check_not_representable_exit_code(capsys):
    code, out, _ = run_cli(
        capsys, "check", "--model", "model_a", "--occupations", "1,1", "--w", "1.35"
    )
    assert code == 1
    assert "not representable" in out
    assert "margin = 0.25" in out


def test_check_functional_hf(capsys):
    code, out, _ = run_cli(
        capsys, "check", "--model", "model_a", "--occupations", "1,1",
        "--functional", "hf",
    )
    assert code == 1
    assert "lambda = -1" in out


def test_check_representable(capsys):
    code, out, _ = run_cli(
        capsys, "check", "--model", "model_a", "--occupations", "1,1", "--w", "0.9"
    )
    assert code == 0
    assert "representable" in out


def test_check_idempotent_hf(capsys):
    code, out, _ = run_cli(
        capsys, "check", "--model", "model_a", "--occupations", "2,0",
        "--functional", "hf",
    )
    assert code == 0
    assert "representable" in out


def test_sweep_csv_contract(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, _, _ = run_cli(
        capsys, "sweep", "--model", "model_a", "--points", "5", "--out", str(out_path)
    )
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "n,lb,ub,hf,gap_lb,gap_ub"
    assert len(lines) == 6
    # Center row carries the half-filling values.
    row = dict(zip(lines[0].split(","), lines[3].split(",")))
    assert abs(float(row["n"]) - 1.0) < 1e-9
    assert abs(float(row["lb"]) - 0.8) < 1e-5
    assert abs(float(row["ub"]) - 1.1) < 1e-5
    assert abs(float(row["hf"]) - 1.35) < 1e-9


def test_sweep_deterministic(capsys, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = run_cli(
            capsys, "sweep", "--model", "hubbard_dimer", "--points", "4",
            "--out", str(path),
        )
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_requires_two_orbitals(capsys, tmp_path):
    spec = builtin_model("hubbard_dimer")
    # A 3-orbital FCIDUMP triggers the regime check.
    from rdmbounds.integrals import OneBodyOperator, SystemSpec, TwoBodyIntegrals

    h = np.zeros((3, 3))
    v = TwoBodyIntegrals(3)
    v.set(0, 0, 0, 0, 1.0)
    big = SystemSpec(3, 2, OneBodyOperator(h), v)
    path = tmp_path / "big.fcidump"
    write_fcidump(big, path)
    code, _, err = run_cli(capsys, "sweep", "--fcidump", str(path), "--points", "3")
    assert code == 2


def test_maxmin_witness_file_equality(capsys, tmp_path):
    wfile = tmp_path / "wit.txt"
    wfile.write_text("matrix = [[0.0, -1.0], [-1.0, 0.0]]\nlambda = 1\n")
    code, out, _ = run_cli(
        capsys, "maxmin", "--model", "hubbard_dimer", "--lambda", "1",
        "--witness-file", str(wfile),
    )
    assert code == 0
    assert "round 1" in out
    last = [ln for ln in out.splitlines() if ln.startswith("round")][-1]
    gap = abs(float(last.split("gap=")[1]))
    assert gap <= 1e-8


def test_maxmin_empty_box_edge(capsys):
    code, out, _ = run_cli(
        capsys, "maxmin", "--model", "hubbard_dimer", "--lambda", "-1",
        "--box", "0", "10",
    )
    assert code == 0
    assert "value=-11.9999999" in out


def test_maxmin_auto_runs_cutting_plane(capsys):
    code, out, _ = run_cli(
        capsys, "maxmin", "--model", "hubbard_dimer", "--lambda", "1", "--auto", "16"
    )
    assert code == 0
    rounds = [ln for ln in out.splitlines() if ln.startswith("round")]
    assert len(rounds) <= 16
    final_gap = abs(float(rounds[-1].split("gap=")[1]))
    assert final_gap <= 1e-4


def test_maxmin_infeasible_exit(capsys, tmp_path):
    wfile = tmp_path / "wit.txt"
    wfile.write_text("matrix = [[0.0, 0.0], [0.0, 0.0]]\nlambda = -1\n")
    code, _, err = run_cli(
        capsys, "maxmin", "--model", "hubbard_dimer", "--lambda", "1",
        "--witness-file", str(wfile), "--box", "5", "6",
    )
    assert code == 3


def test_fcidump_input(capsys, tmp_path):
    path = tmp_path / "hub.fcidump"
    write_fcidump(builtin_model("hubbard_dimer"), path)
    code, out, _ = run_cli(capsys, "exact", "--fcidump", str(path))
    assert code == 0
    assert "-0.828427" in out


def test_missing_fcidump_is_input_error(capsys):
    code, _, err = run_cli(capsys, "exact", "--fcidump", "/nonexistent/file")
    assert code == 2


def test_bad_gamma_file_syntax(capsys, tmp_path):
    gfile = tmp_path / "gamma.txt"
    gfile.write_text("occupations = [1.0, oops]\n")
    code, _, err = run_cli(capsys, "bounds", "--model", "model_a", "--gamma", str(gfile))
    assert code == 2


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rdmbounds.cli", "exact", "--model", "hubbard_dimer"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "-0.828427" in proc.stdout
