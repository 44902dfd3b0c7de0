import json
import math
import subprocess
import sys

import pytest

from moyalgeo.cli import ENV_TRUNCATION, main
from moyalgeo.reports import read_csv_rows


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compare_eigenstates(capsys):
    code, out, err = run(capsys, "compare", "eig:0", "eig:1", "--no-figures")
    assert code == 0
    rows = {(r["quantity"], r["method"]): r for r in read_csv_rows(out)}
    assert float(rows[("d_D", "analytic")]["value"]) == pytest.approx(1 / math.sqrt(2))
    assert float(rows[("d_L_mod", "analytic")]["value"]) == pytest.approx(math.sqrt(3) - 1)
    assert float(rows[("d_D/d_L_mod", "ratio")]["value"]) == pytest.approx(0.965926, abs=1e-6)
    assert "check pass" in err


def test_compare_translated_ground_states(capsys):
    code, out, _ = run(capsys, "compare", "coh:0:1,0", "coh:0:4,4", "--solver", "none")
    assert code == 0
    rows = {r["quantity"]: r for r in read_csv_rows(out)}
    assert float(rows["d_D"]["value"]) == pytest.approx(5)
    assert float(rows["d_L_mod"]["value"]) == pytest.approx(5)
    assert float(rows["d_D_doubled_cross"]["value"]) == pytest.approx(math.sqrt(27))


def test_spectrum_json(capsys):
    code, out, _ = run(capsys, "spectrum", "--truncation", "40", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] is True
    vals = [r["eigenvalue"] for r in doc["rows"]]
    assert vals == pytest.approx([math.sqrt(4 * m + 2) for m in range(4)], abs=1e-5)


def test_ratio_and_double(capsys):
    code, out, _ = run(capsys, "ratio", "--n-max", "3")
    assert code == 0
    rows = read_csv_rows(out)
    assert float(rows[0]["ratio"]) == pytest.approx(-0.0340742, abs=1e-6)
    code, _, _ = run(capsys, "double", "--m", "0")
    assert code == 0


def test_star_projector(capsys):
    code, out, _ = run(capsys, "star", "--op", "projector", "--resolution", "64")
    assert code == 0


def test_geodesic_reports_failing_check(capsys):
    code, out, err = run(capsys, "geodesic", "--truncation", "16")
    rows = read_csv_rows(out)
    assert any(r for r in rows)
    assert code in (0, 1)
    assert ("FAIL" in err) == (code == 1)


def test_invalid_truncation_is_an_error(capsys):
    code, out, err = run(capsys, "spectrum", "--truncation", "2", "--format", "json")
    assert code == 2
    doc = json.loads(out)
    assert doc["ok"] is False and doc["error"] == "InvalidTruncation"
    assert err.startswith("error:")


def test_bad_state_is_an_error(capsys):
    code, out, _ = run(capsys, "compare", "eig:0", "foo:1")
    assert code == 2
    assert read_csv_rows(out)[0]["error"] == "DomainError"


def test_env_truncation_override(capsys, monkeypatch):
    monkeypatch.setenv(ENV_TRUNCATION, "12")
    code, out, _ = run(capsys, "spectrum", "--levels", "1")
    assert code == 0
    assert read_csv_rows(out)[0]["N"] == "12"
    code, out, _ = run(capsys, "spectrum", "--levels", "1", "--truncation", "16")
    assert read_csv_rows(out)[0]["N"] == "16"


def test_out_writes_table_and_figure(tmp_path, capsys):
    path = tmp_path / "spec.csv"
    code, out, _ = run(capsys, "spectrum", "--truncation", "12", "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("level,")
    assert path.with_suffix(".png").stat().st_size > 0
    path2 = tmp_path / "nofig.csv"
    run(capsys, "spectrum", "--truncation", "12", "--out", str(path2), "--no-figures")
    assert not path2.with_suffix(".png").exists()


def test_output_is_byte_identical_across_runs():
    cmd = [sys.executable, "-m", "moyalgeo.cli", "compare", "sph:0,2:0.6,0,0.8", "sph:0,2:0.6,0,-0.8"]
    a = subprocess.run(cmd, capture_output=True)
    b = subprocess.run(cmd, capture_output=True)
    assert a.returncode == b.returncode
    assert a.stdout == b.stdout and a.stdout
