import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from shapejc import cli, dressed
from shapejc.errors import ConvergenceFailure

GOLDEN = Path(__file__).parent / "golden"
MORSE = ["--family", "morse", "--v0", "25", "--lambda", "1", "--mass", "0.5", "--omega-drive", "2"]
HO = ["--family", "ho", "--mass", "1", "--omega", "1"]

GOLDEN_RUNS = {
    "families.txt": ["families"],
    "families.json": ["families", "--format", "json"],
    "spectrum_morse.json": ["spectrum", *MORSE, "--levels", "2", "--format", "json"],
    "spectrum_morse.txt": ["spectrum", *MORSE, "--levels", "4"],
    "spectrum_morse.csv": ["spectrum", *MORSE, "--levels", "4", "--format", "csv"],
    "dressed_morse.json": ["dressed", *MORSE, "--n-max", "3", "--format", "json"],
}


def run(*args):
    proc = subprocess.run([sys.executable, "-m", "shapejc", *args], capture_output=True)
    return proc.returncode, proc.stdout, proc.stderr.decode()


@pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
def test_golden_bytes(name):
    code, out, _ = run(*GOLDEN_RUNS[name])
    assert code == 0
    assert out == (GOLDEN / name).read_bytes()


def test_output_flag_writes_same_bytes(tmp_path):
    target = tmp_path / "out.json"
    assert cli.main([*GOLDEN_RUNS["spectrum_morse.json"], "--output", str(target)]) == 0
    assert target.read_bytes() == (GOLDEN / "spectrum_morse.json").read_bytes()


def test_spectrum_schema():
    data = json.loads((GOLDEN / "spectrum_morse.json").read_text())
    assert set(data) == {"family", "hbar", "omega_drive", "ground", "levels"}
    assert data["ground"] == 0.0
    lev = data["levels"][1]
    assert lev["e_minus"] == pytest.approx(14 - np.sqrt(28), abs=1e-10)
    assert lev["e_plus"] == pytest.approx(14 + np.sqrt(28), abs=1e-10)


def test_families_flags_scaling():
    data = json.loads((GOLDEN / "families.json").read_text())
    flags = {f["name"]: f["grid_supported"] for f in data["families"]}
    assert flags == {"ho": True, "morse": True, "scaling": False}
    assert "analytic-only" in (GOLDEN / "families.txt").read_text()


def test_zero_drive_rows(capsys):
    args = ["spectrum", *MORSE[:-1], "0", "--levels", "3", "--format", "json"]
    assert cli.main(args) == 0
    for lev in json.loads(capsys.readouterr().out)["levels"]:
        assert lev["e_minus"] == lev["e_plus"] == lev["epsilon"]


def test_dressed_smallest_and_ho(capsys):
    assert cli.main(["dressed", *MORSE, "--n-max", "0", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["basis"]) == 3
    assert cli.main(["dressed", *HO, "--omega-drive", "4", "--n-max", "1", "--format", "json"]) == 0
    values = [row["numeric"] for row in json.loads(capsys.readouterr().out)["eigenvalues"]]
    assert -1.0 in values


def test_level_out_of_range_exit_3():
    code, _, err = run("spectrum", *MORSE, "--levels", "9")
    assert code == 3
    assert "4 dressed pairs" in err


def test_scaling_verify_exit_3():
    code, _, err = run("verify", "--family", "scaling", "--r1", "1", "--q", "0.5")
    assert code == 3
    assert "analytic-only family" in err


def test_usage_errors_exit_2():
    assert run("bogus")[0] == 2
    assert run("spectrum", "--family", "morse", "--v0", "25")[0] == 2
    assert run("spectrum", *MORSE, "--levels", "-1")[0] == 2


def test_negative_drive_exit_3():
    assert run("spectrum", *MORSE[:-1], "-2")[0] == 3


def test_verify_reference_and_breach(capsys):
    assert cli.main(["verify", *MORSE, "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert all(lev["rel_error"] <= 1e-3 for lev in report["levels"])
    assert cli.main(["verify", *MORSE, "--tolerance", "1e-6"]) == 4


def test_verify_converge_table(capsys):
    assert cli.main(["verify", *MORSE, "--converge"]) == 0
    lines = capsys.readouterr().out.splitlines()
    orders = [float(line.split()[-1]) for line in lines[-3:-1]]
    assert all(1.6 <= p <= 2.4 for p in orders)


def test_residual_exit_codes():
    assert cli.main(["residual", *HO]) == 0
    assert cli.main(["residual", *HO, "--break-remainder"]) == 4


def test_dressed_self_check_exit_4(monkeypatch):
    real = dressed.eig_symmetric

    def skewed(*args, **kwargs):
        dec = real(*args, **kwargs)
        return type(dec)(dec.values + 1e-6, dec.vectors)

    monkeypatch.setattr(dressed, "eig_symmetric", skewed)
    assert cli.main(["dressed", *MORSE, "--n-max", "1"]) == 4


def test_numerical_failure_exit_5(monkeypatch):
    def broken(*args, **kwargs):
        raise ConvergenceFailure(2, 60)

    monkeypatch.setattr(dressed, "eig_symmetric", broken)
    assert cli.main(["dressed", *MORSE, "--n-max", "1"]) == 5


def test_repeat_runs_identical():
    first = run("dressed", *HO, "--omega-drive", "3", "--format", "csv")
    second = run("dressed", *HO, "--omega-drive", "3", "--format", "csv")
    assert first == second and first[0] == 0
