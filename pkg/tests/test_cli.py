import json
import math

import numpy as np
import pytest

from optslater import basis_state, builtin_state, dump, load
from optslater.cli import jsonable, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if code == 0 else None), err


@pytest.fixture
def files(tmp_path, capsys):
    code, rep, _ = run(capsys, "examples", "--out", tmp_path)
    assert code == 0
    return {w["name"]: w["path"] for w in rep["written"]}


def test_examples_writes_all_builtins(files):
    assert set(files) == {"ghz", "example2", "example3", "example3b", "example4", "eq36", "fourterm", "cyclic"}
    assert load(files["eq36"]) == builtin_state("eq36")


def test_examples_single(tmp_path, capsys):
    code, rep, _ = run(capsys, "examples", "--name", "ghz(sqrt(1/2),sqrt(1/2),3)", "--out", tmp_path)
    assert code == 0 and len(rep["written"]) == 1
    assert load(rep["written"][0]["path"]).allclose(builtin_state("ghz", 2 ** -0.5, 2 ** -0.5, 3))


def test_analyze_eq36(files, capsys):
    code, rep, _ = run(capsys, "analyze", files["eq36"])
    assert code == 0
    assert np.allclose(rep["occupations"], [2 / 3] * 3 + [1 / 3] * 3, atol=1e-14)
    assert rep["borland_dennis"]["satisfied"]
    assert rep["input"]["d"] == 6 and rep["input"]["N"] == 3 and rep["input"]["terms"] == 3
    assert len(rep["rdm"]) == 6 and rep["rdm"][0][0] == [pytest.approx(2 / 3), 0.0]


def test_analyze_slater(tmp_path, capsys):
    p = tmp_path / "s.fst"
    dump(basis_state(6, 1, 2, 3), p)
    code, rep, _ = run(capsys, "analyze", p)
    assert rep["envelope_rank"] == 3
    assert rep["borland_dennis"]["satisfied"]
    assert len(rep["certain_orbitals"]) == 3
    assert [1, 2] in rep["simultaneous_pairs"]


def test_analyze_non36_has_no_bd(files, capsys):
    code, rep, _ = run(capsys, "analyze", files["example3"])
    assert rep["borland_dennis"] is None
    assert [1, 2] in rep["simultaneous_pairs"]


def test_approximate(files, capsys):
    code, rep, _ = run(capsys, "approximate", files["ghz"])
    assert rep["approximation"]["value"] == pytest.approx(2 / 3, abs=1e-8)
    assert rep["reduction"]["leaves"] == 2
    code, rep, _ = run(capsys, "approximate", files["eq36"])
    assert rep["approximation"]["value"] == pytest.approx(4 / 9, abs=1e-8)
    assert rep["approximation"]["via"] == "sweep" and rep["reduction"] is None
    assert len(rep["approximation"]["frame"]) == 3 and len(rep["approximation"]["frame"][0]) == 6
    code, rep, _ = run(capsys, "approximate", files["eq36"], "--rank", 5)
    assert rep["approximation"]["value"] == pytest.approx(2 / 3, abs=1e-8)


def test_approximate_flags(files, capsys):
    code, rep, _ = run(capsys, "approximate", files["cyclic"], "--restarts", 4, "--seed", 3, "--tol", 1e-13)
    assert rep["approximation"]["restarts_used"] == 4
    assert rep["approximation"]["value"] == pytest.approx(3 / 4, abs=1e-8)


def test_normalize_flag(tmp_path, capsys):
    p = tmp_path / "u.fst"
    p.write_text("4 2\n1 2 3 0\n3 4 4 0\n")
    code, _, err = run(capsys, "approximate", p)
    assert code == 1 and "NotNormalized" in err
    code, rep, _ = run(capsys, "approximate", p, "--normalize")
    assert rep["approximation"]["value"] == pytest.approx(0.64, abs=1e-8)


def test_reduce_example3(files, capsys):
    code, rep, _ = run(capsys, "reduce", files["example3"])
    assert rep["reduction"]["leaves"] == 3
    assert rep["reduction"]["imax"] == pytest.approx(0.64, abs=1e-8)
    assert rep["reduction"]["tree"]["kind"] == "branch"


def test_canonical36(capsys):
    code, rep, _ = run(capsys, "canonical36", "builtin:eq36")
    assert code == 0
    cf = rep["canonical_form"]
    assert set(cf["coefficients"]) == set("ABCDE")
    A = cf["coefficients"]["A"]
    assert A[1] == 0 and A[0] ** 2 == pytest.approx(4 / 9, abs=1e-8)
    assert cf["reconstruction_error"] < 1e-9
    assert rep["blocks"]["unit_trace"]
    assert all(t == pytest.approx(1, abs=1e-10) for t in rep["blocks"]["traces"])
    assert set(cf["basis"]) == {"e1", "e2", "e3", "h1", "h2", "h3"}


def test_ensemble_csv_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code, rep, _ = run(capsys, "ensemble", "--N", 3, "--d", 6, "--samples", 20, "--seed", 5, "--csv", a)
    assert code == 0 and rep["ensemble"]["violations"] == 0 and rep["csv"] == str(a)
    run(capsys, "ensemble", "--N", 3, "--d", 6, "--samples", 20, "--seed", 5, "--csv", b)
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize(
    "argv, name",
    [
        (["approximate", "builtin:eq36", "--rank", "9"], "BadRank"),
        (["analyze", "missing.fst"], "FileNotFoundError"),
        (["analyze", "builtin:nosuch"], "UnknownName"),
        (["canonical36", "builtin:ghz(0.8,0.6,4)"], "WrongShape"),
        (["ensemble", "--N", "8", "--d", "16", "--samples", "1"], "TooLarge"),
    ],
)
def test_errors_one_line(capsys, argv, name):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err.count("\n") == 1 and name in err


def test_parse_error_names_line(tmp_path, capsys):
    p = tmp_path / "bad.fst"
    p.write_text("3 2\n1 2 x\n")
    code, _, err = run(capsys, "analyze", p)
    assert code == 1 and "ParseError: line 2:" in err


def test_console_script():
    import shutil
    import subprocess
    exe = shutil.which("optslater")
    if exe is None:
        pytest.skip("console script not installed")
    out = subprocess.run([exe, "approximate", "builtin:eq36"], capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["approximation"]["value"] == pytest.approx(4 / 9, abs=1e-8)


def test_number_format():
    rep = jsonable({"x": 2 / 3, "z": 1 / 3 + 2j, "a": np.array([math.pi]), "b": np.bool_(True), "n": np.int64(3)})
    assert rep == {"x": 0.666666666666667, "z": [0.333333333333333, 2.0], "a": [3.14159265358979], "b": True, "n": 3}
    assert json.loads(json.dumps(rep)) == rep
