import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from fbentangle.cli import main
from fbentangle.matrixio import load_matrix, save_matrix
from fbentangle.parametric import free_cm, reduced_drift


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_bound(capsys):
    code, rep = run_json(capsys, "bound", "--modes", "2", "--chi", "0.45")
    assert code == 0
    assert rep["en_bound"] == pytest.approx(3.32, abs=0.005)
    assert rep["alpha1"] == pytest.approx(0.1)


def test_bound_text_output(capsys):
    code, out, _ = run(capsys, "bound", "--modes", "6", "--chi", "0.08")
    assert code == 0
    assert "nu_sq_bound: 0.168" in out


def test_bound_from_hamiltonian_file(tmp_path, capsys):
    path = tmp_path / "h.json"
    save_matrix(path, np.zeros((4, 4)))
    code, rep = run_json(capsys, "bound", "--hamiltonian", str(path))
    assert code == 0
    assert rep["en_bound"] == pytest.approx(0.0)


def test_free(capsys):
    code, rep = run_json(capsys, "free", "--modes", "2", "--chi", "0.45")
    assert code == 0
    assert rep["log_neg"] == pytest.approx(0.93, abs=0.005)
    assert rep["log_neg_closed_form"] == pytest.approx(rep["log_neg"], abs=1e-10)


def test_local(capsys):
    code, rep = run_json(capsys, "local", "--modes", "2", "--chi", "0.45")
    assert code == 0
    assert rep["log_neg"] == pytest.approx(2.12, abs=0.01)


@pytest.mark.parametrize("cmd", ["bound", "free", "optimal", "local"])
def test_above_threshold_exits_one(cmd, capsys):
    code, _, err = run(capsys, cmd, "--modes", "2", "--chi", "0.5")
    assert code == 1
    assert "threshold" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["free", "--chi", "0.1"],
        ["free", "--modes", "1", "--chi", "0.1"],
        ["free", "--modes", "3", "--chi", "0.1", "--bipartitions", "1:1"],
        ["verify", "--modes", "2", "--chi", "0.1"],
        ["sweep"],
    ],
)
def test_input_errors_exit_two(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_bad_chi_range_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--modes", "2", "--chi-range", "0:1"])
    assert exc.value.code == 2


def test_optimal_then_verify(tmp_path, capsys):
    code, rep = run_json(capsys, "optimal", "--modes", "2", "--chi", "0.45", "--out", str(tmp_path))
    assert code == 0
    assert rep["log_neg"] == pytest.approx(3.32, abs=0.005)
    for name in ("sigma_opt.json", "u_opt.json", "drift.json"):
        assert (tmp_path / name).exists()
    U = load_matrix(tmp_path / "u_opt.json")
    assert np.allclose(U, U.T) and np.linalg.eigvalsh(U)[0] > -1e-10

    code, out, _ = run(capsys, "verify", "--sigma", str(tmp_path / "sigma_opt.json"),
                       "--drift", str(tmp_path / "drift.json"))
    assert code == 0
    assert out.count("PASS") == 6


@pytest.mark.parametrize(
    "sigma, expected",
    [(free_cm(1, 1, 0.45), 0), (0.5 * np.eye(4), 1)],
    ids=["free-state", "unphysical"],
)
def test_verify(tmp_path, capsys, sigma, expected):
    path = tmp_path / "s.json"
    save_matrix(path, sigma)
    code, rep = run_json(capsys, "verify", "--sigma", str(path), "--modes", "2", "--chi", "0.45")
    assert code == expected
    assert rep["ok"] == (expected == 0)
    if expected:
        failed = {c["check"] for c in rep["checks"] if not c["ok"]}
        assert "physical" in failed


def test_verify_with_explicit_drift(tmp_path, capsys):
    save_matrix(tmp_path / "s.json", free_cm(1, 2, 0.2))
    save_matrix(tmp_path / "a.json", reduced_drift(1, 2, 0.2))
    code, _, _ = run(capsys, "verify", "--sigma", str(tmp_path / "s.json"), "--drift", str(tmp_path / "a.json"))
    assert code == 0


def test_verify_malformed_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "verify", "--sigma", str(path), "--modes", "2", "--chi", "0.1")
    assert code == 2
    assert "broken.json:1:2" in err


def test_sweep_files_and_determinism(tmp_path, capsys):
    args = ["sweep", "--modes", "4", "--chi-range", "0:0.15:4", "--bipartitions", "1:3,2:2"]
    code, rep = run_json(capsys, *args, "--out", str(tmp_path / "a"))
    assert code == 0
    assert rep["points"] == 8 and rep["succeeded"] == 8
    run(capsys, *args, "--out", str(tmp_path / "b"))
    for name in ("sweep_1-3.csv", "sweep_2-2.csv", "sweep_combined.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    rows = list(csv.DictReader(open(tmp_path / "a" / "sweep_2-2.csv")))
    assert [rows[0][k] for k in ("chi", "nu_free", "nu_local", "nu_bound")] == ["0", "1", "1", "1"]
    combined = list(csv.DictReader(open(tmp_path / "a" / "sweep_combined.csv")))
    assert [r["bipartition"] for r in combined] == ["1:3"] * 4 + ["2:2"] * 4


def test_sweep_mostly_failing_exits_one(tmp_path, capsys):
    code, _, _ = run(capsys, "sweep", "--modes", "2", "--chi-range", "0.3:0.7:5", "--out", str(tmp_path))
    assert code == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fbentangle", "bound", "--modes", "2", "--chi", "0.45"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "en_bound: 3.32192809489" in proc.stdout
