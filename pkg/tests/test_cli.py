import csv
import io
import json
import subprocess
import sys

import pytest

from hexopt.cli import main
from hexopt.runner import FIELD_NAMES


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_builtin_csv(capsys):
    assert main(["run", "--scenario", "table2", "--verify"]) == 0
    out, err = capsys.readouterr()
    rows = _rows(out)
    assert len(rows) == 7 and list(rows[0]) == list(FIELD_NAMES)
    assert "verify" in err


def test_run_json_to_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "--scenario", "table3-am-reference", "--format", "json", "--out", str(out), "-q"]) == 0
    assert capsys.readouterr() == ("", "")
    data = json.loads(out.read_text())
    copper = next(r for r in data if r["material"] == "copper")
    assert copper["feasible"] is False


def test_run_is_byte_identical(capsys):
    main(["run", "--scenario", "table3-material-specific", "-q"])
    first = capsys.readouterr().out
    main(["run", "--scenario", "table3-material-specific", "-q", "--jobs", "2"])
    assert capsys.readouterr().out == first


def test_sweep_eff_grid(capsys):
    assert main(["sweep-eff", "--scenario", "fig3-sweep", "--grid", "0.6:0.9:0.15", "-q", "--verify"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 6 * 3
    assert {r["strategy"] for r in rows} == {"material_specific_fouling"}


def test_sweep_thickness(capsys):
    argv = ["sweep-thickness", "--scenario", "fig4-sweep", "--material", "Austenitic Steel"]
    argv += ["--t-grid", "0.1, 0.2", "--eps-set", "0.6", "-q"]
    assert main(argv) == 0
    rows = _rows(capsys.readouterr().out)
    assert [float(r["t"]) for r in rows] == pytest.approx([1e-4, 2e-4])
    assert all(r["material"] == "austenitic_steel" for r in rows)


def test_limits(capsys):
    assert main(["limits", "--material", "copper", "--t", "0.5"]) == 0
    out = capsys.readouterr().out
    m = float(out.split("M=")[1].split()[0])
    lim = float(out.split("eps_limit=")[1].split()[0])
    assert 0.52 <= m <= 0.54
    assert 0.735 <= lim <= 0.745


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["run", "--scenario", str(tmp_path / "nope.scn")]) == 1
    bad = tmp_path / "bad.scn"
    bad.write_text("[scenario]\neps_d 0.8\n")
    assert main(["run", "--scenario", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err
    assert main(["limits", "--material", "brass", "--t", "0.5"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["sweep-eff", "--scenario", "fig3-sweep", "--grid", "0.9:0.6:0.1"])
    assert info.value.code == 2


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hexopt.cli", "limits", "--material", "aln", "--t", "0.25"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert proc.stdout.startswith("material=aln")
