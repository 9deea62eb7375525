import csv
import json
import subprocess
import sys

import mpmath
import pytest

from zetabessel import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_special_eval_K_half(capsys):
    code, out, _ = run(["special", "eval", "--fn", "bessel_K", "--nu", "0.5", "--z", "2", "--digits", "40"], capsys)
    assert code == 0
    with mpmath.workdps(50):
        ref = mpmath.sqrt(mpmath.pi / 4) * mpmath.exp(-2)
        assert abs(mpmath.mpf(out.strip()) - ref) < mpmath.mpf("1e-39")


def test_characters_list(capsys):
    code, out, _ = run(["characters", "list", "--q", "5"], capsys)
    rows = json.loads(out)
    assert code == 0 and len(rows) == 4
    assert sum(r["parity"] == "odd" for r in rows) == 2
    assert all(isinstance(r["tau"]["re"], str) for r in rows)


def test_arith(capsys):
    assert run(["arith", "r6", "--n", "3", "--method", "brute"], capsys)[1].strip() == "160"
    assert run(["arith", "r6", "--n", "3"], capsys)[1].strip() == "160"
    assert run(["arith", "r2", "--n", "25"], capsys)[1].strip() == "12"
    assert run(["arith", "sigma", "--n", "12", "--k", "1"], capsys)[1].strip() == "28"


def test_arith_bad_value(capsys):
    code, _, err = run(["arith", "r6", "--n", "0", "--method", "formula"], capsys)
    assert code == 2 and "error" in err


def test_usage_errors(capsys):
    assert run(["nonsense"], capsys)[0] == 2
    assert run(["verify"], capsys)[0] == 2
    assert run(["special", "eval", "--fn", "bessel_K", "--z", "1"], capsys)[0] == 2


def test_verify_k_must_be_even(capsys):
    code, _, err = run(["verify", "--id", "T_ODD1", "--k", "3", "--nu", "0.75", "--a", "2", "--x", "1.3",
                        "--theta", "0.3333333333"], capsys)
    assert code == 2 and "k must be even" in err


def test_verify_pole_set(capsys):
    code, _, err = run(["verify", "--id", "K_ODD", "--nu", "0.6", "--theta", "0.3", "--x", "0.7", "--N", "0",
                        "--digits", "30"], capsys)
    assert code == 2 and "x in pole set" in err


def test_verify_passes_and_reports(capsys):
    code, out, _ = run(["verify", "--id", "O_SIGMA_K", "--k", "1", "--nu", "0.5", "--a", "2", "--x", "1",
                        "--digits", "30", "--tol", "1e-8"], capsys)
    report = json.loads(out)
    assert code == 0 and report["passed"] and report["tolerance"] == "1e-8"
    for key in ("lhs", "rhs", "abs_residual", "rel_residual"):
        assert isinstance(report[key], str)


def test_verify_residual_failure_exit_1(capsys):
    # an impossible tolerance turns a balanced identity into a residual failure
    code, out, _ = run(["verify", "--id", "O_SIGMA_K", "--k", "1", "--nu", "0.5", "--a", "2", "--x", "1",
                        "--digits", "30", "--tol", "1e-60"], capsys)
    assert code == 1 and not json.loads(out)["passed"]


def test_env_digits(monkeypatch, capsys):
    monkeypatch.setenv("ZETABESSEL_DIGITS", "25")
    code, out, _ = run(["special", "eval", "--fn", "gamma", "--s", "0.5"], capsys)
    assert code == 0 and len(out.strip().replace(".", "")) <= 26
    monkeypatch.setenv("ZETABESSEL_DIGITS", "lots")
    assert run(["special", "eval", "--fn", "gamma", "--s", "0.5"], capsys)[0] == 2


def test_suite_empty_grid(tmp_path, capsys):
    grid = tmp_path / "empty.json"
    grid.write_text("[]")
    code, _, err = run(["suite", "--name", "oracles", "--grid", str(grid), "--digits", "30"], capsys)
    assert code == 2 and "empty grid" in err


def test_suite_bad_grid(tmp_path, capsys):
    grid = tmp_path / "bad.json"
    grid.write_text('{"id": "O_COHEN"}')
    assert run(["suite", "--name", "oracles", "--grid", str(grid), "--digits", "30"], capsys)[0] == 2


@pytest.mark.parametrize("name", ["cohen", "voronoi", "all"])
def test_suite_requires_digits(name, capsys):
    code, _, err = run(["suite", "--name", name, "--digits", "20"], capsys)
    assert code == 2 and "digits" in err


def test_suite_hypothesis_violation(tmp_path, capsys):
    grid = tmp_path / "g.json"
    grid.write_text(json.dumps([{"id": "T_ODD1", "k": 3, "nu": "0.5", "a": "2", "x": "1", "theta": "1/3"}]))
    code, _, err = run(["suite", "--name", "main_theorems", "--grid", str(grid), "--digits", "30"], capsys)
    assert code == 2 and "k must be even" in err


def test_suite_report_and_csv(tmp_path, capsys):
    grid = tmp_path / "g.json"
    grid.write_text(json.dumps([
        {"id": "O_SIGMA_K", "k": 1, "nu": "0.5", "a": "2", "x": "1"},
        {"id": "O_SIGMA_K", "k": 3, "nu": "0.25", "a": "3", "x": "0.8"},
    ]))
    report = tmp_path / "out.json"
    code, _, _ = run(["suite", "--name", "oracles", "--grid", str(grid), "--digits", "30",
                      "--report", str(report), "--jobs", "2"], capsys)
    assert code == 0
    data = json.loads(report.read_text())
    assert [r["case"]["params"]["k"] for r in data] == ["1", "3"]
    rows = list(csv.reader(open(tmp_path / "out.csv")))
    assert rows[0] == ["id", "rel_residual", "pass"]
    assert [r[2] for r in rows[1:]] == ["true", "true"]


def test_suite_failure_exit_1(tmp_path, capsys):
    grid = tmp_path / "g.json"
    grid.write_text(json.dumps([{"id": "O_SIGMA_K", "k": 1, "nu": "0.5", "a": "2", "x": "1"}]))
    code, _, _ = run(["suite", "--name", "oracles", "--grid", str(grid), "--digits", "30", "--tol", "1e-60"], capsys)
    assert code == 1


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "zetabessel.cli", "arith", "r2", "--n", "5"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "8"


def test_shipped_grids_load():
    for name in cli.SUITES:
        grid = cli.load_grid(name)
        assert grid and all("id" in e or "bridge" in e for e in grid)
