import csv
import io
import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from qhj.cli import (EIGEN_SCHEMA, EXIT_CONFIG, EXIT_OK, EXIT_TOLERANCE, JSON_SCHEMAS, RunConfig,
                     main)
from qhj.errors import ConfigError

COLUMNS = {
    "qcorr": ["x", "p", "reQ0", "imQ0", "reQ", "imQ", "reP"],
    "spectrum": ["k", "quant", "maslov4"],
    "trajectory": ["t", "x", "branch"],
    "timeshift": ["k", "dt", "dt_fwd", "dt_bwd"],
    "wave": ["x", "psi", "envelope", "phase"],
}

ARGS = {
    "qcorr": ["qcorr", "--potential", "linear", "--window=-2:6", "--grid", "9"],
    "spectrum": ["spectrum", "--k-range", "0.8:2.0:12"],
    "trajectory": ["trajectory", "--k", "1", "--periods", "1", "--grid", "9"],
    "timeshift": ["timeshift", "--k-range", "1:2:2"],
    "wave": ["wave", "--potential", "linear", "--window=-2:4", "--grid", "9"],
}


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.mark.parametrize("cmd", sorted(COLUMNS))
def test_csv_schema(cmd, capsys):
    code, out, _ = run(ARGS[cmd], capsys)
    assert code == EXIT_OK
    table = rows(out)
    assert table[0] == COLUMNS[cmd]
    assert len(table) > 2
    assert all(len(r) == len(table[0]) for r in table)


@pytest.mark.parametrize("cmd", sorted(COLUMNS))
def test_json_schema_and_determinism(cmd, capsys):
    code, out, _ = run(ARGS[cmd] + ["--format", "json"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    jsonschema.validate(doc, JSON_SCHEMAS[cmd])
    assert doc["columns"] == COLUMNS[cmd]
    _, again, _ = run(ARGS[cmd] + ["--format", "json"], capsys)
    assert again == out


def test_spectrum_eigen_sidecar(tmp_path, capsys):
    out = tmp_path / "spec.csv"
    code, _, _ = run(["spectrum", "--k-range", "0.5:3.1:60", "--out", str(out)], capsys)
    assert code == EXIT_OK
    side = json.loads((tmp_path / "spec.csv.eigen.json").read_text())
    jsonschema.validate(side, EIGEN_SCHEMA)
    np.testing.assert_allclose(np.square(side["eigen_k"]), [1, 3, 5, 7, 9], atol=1e-6)
    assert side["labels"] == [0, 1, 2, 3, 4]
    assert rows(out.read_text())[0] == COLUMNS["spectrum"]


def test_empty_spectrum_window_is_ok(capsys):
    code, out, err = run(["spectrum", "--k-range", "1.2:1.6:5", "--format", "json"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["eigen_k"] == []
    assert "warning" in err


def test_wave_compare_columns(capsys):
    code, out, _ = run(ARGS["wave"] + ["--compare", "both"], capsys)
    assert code == EXIT_OK
    table = rows(out)
    assert table[0] == COLUMNS["wave"] + ["psi_wkb", "psi_oracle"]
    psi = np.array([float(r[1]) for r in table[1:]])
    oracle = np.array([float(r[5]) for r in table[1:]])
    np.testing.assert_allclose(psi, oracle, atol=1e-6)


def test_trajectory_apparent_branch(capsys):
    code, out, _ = run(ARGS["trajectory"] + ["--compare", "apparent"], capsys)
    assert code == EXIT_OK
    branches = {int(r[2]) for r in rows(out)[1:]}
    assert -1 in branches and 0 in branches


@pytest.mark.parametrize("case", ["linear-q", "linear-q0", "ho-spectrum"])
def test_oracle_compare_passes(case, capsys):
    code, out, _ = run(["oracle-compare", "--case", case], capsys)
    assert code == EXIT_OK
    assert rows(out)[1][3] == "true"


def test_oracle_compare_tolerance_exit(capsys):
    code, _, err = run(["oracle-compare", "--case", "linear-q", "--tol", "1e-15"], capsys)
    assert code == EXIT_TOLERANCE
    assert "exceeds" in err


@pytest.mark.parametrize("argv", [
    ["spectrum", "--k-range", "3:1:10"],
    ["timeshift", "--potential", "linear", "--k-range", "1:2:3"],
    ["trajectory", "--k", "1", "--periods", "0"],
    ["qcorr", "--potential", "poly"],
    ["qcorr", "--k", "1", "--hbar", "-1"],
    ["spectrum", "--potential", "linear", "--k-range", "1:2:5"],
])
def test_config_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == EXIT_CONFIG
    assert "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--format", "xml"])
    assert exc.value.code == 2


def test_constant_polynomial_gives_zero_correction(capsys):
    code, out, _ = run(["qcorr", "--potential", "poly", "--coeffs", "0.5", "--k", "1",
                        "--window=-1:1", "--grid", "5"], capsys)
    assert code == EXIT_OK
    for r in rows(out)[1:]:
        assert float(r[4]) == pytest.approx(0.0, abs=1e-12)


def test_run_config_round_trip():
    cfg = RunConfig(command="spectrum", k_range=(0.5, 3.0, 40), window=(-6.0, 6.0),
                    coeffs=None, matching="imag", workers=3)
    assert RunConfig.from_json(cfg.to_json()) == cfg
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"command": "spectrum", "bogus": 1})
    with pytest.raises(ConfigError):
        RunConfig(command="spectrum")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qhj", "timeshift", "--k-range", "1:1.5:2"],
                         capture_output=True, text=True, timeout=300)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "k,dt,dt_fwd,dt_bwd"
