import json
import subprocess
import sys

import pytest

from hybridloc.cli import main
from hybridloc.harness import report_from_json, rows_from_csv
from hybridloc.measurements import MeasurementSet

FAST = ["--ga-pop", "30", "--ga-gens", "30", "--restarts", "2"]


def test_solve_csv_and_exit_zero(tmp_path):
    out = tmp_path / "r.csv"
    code = main(["solve", "--scenario", "fig5", "--seed", "5", *FAST, "--out", str(out), "--no-timings"])
    assert code == 0
    rows = rows_from_csv(out.read_text())
    assert [r.rover for r in rows] == list(range(1, 9))
    assert all(r.status == "ConvergedStep" for r in rows)


def test_solve_ga_mode(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["solve", "--scenario", "fig5", "--mode", "ga", *FAST, "--out", str(out)]) == 0
    assert all(r.status == "GaOnly" and r.iterations is None for r in rows_from_csv(out.read_text()))


def test_solve_json_echoes_config(tmp_path):
    out = tmp_path / "r.json"
    assert main(["solve", "--scenario", "fig5", "--seed", "9", *FAST, "--format", "json", "--out", str(out)]) == 0
    rep = report_from_json(out.read_text())
    assert rep.seed == 9
    assert rep.config["ga"]["restarts"] == 2
    assert rep.config["newton"]["step_tolerance"] == 1e-10
    assert rep.summary["ga_seconds"] > 0


def test_solve_unconverged_exit_two(tmp_path):
    out = tmp_path / "r.csv"
    code = main(["solve", "--scenario", "fig5", *FAST, "--newton-max-iter", "1", "--out", str(out)])
    assert code == 2
    assert out.exists()


def test_config_errors_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"rovers": [{"id": 1, "x": 1, "y": 1}]}')
    assert main(["solve", "--scenario", str(bad)]) == 1
    assert "rover 0" in capsys.readouterr().err
    assert main(["solve", "--scenario", str(tmp_path / "none.json")]) == 1
    assert main(["solve", "--scenario", "fig5", "--ga-pop", "1"]) == 1
    assert main(["solve", "--scenario", "fig5", "--format", "xml"]) == 1
    assert main(["sweep", "--scenario", "fig5", "--n", "a,b"]) == 1


def test_synth_dump(tmp_path):
    out = tmp_path / "m.json"
    assert main(["synth", "--scenario", "fig5", "--noise-sigma", "0.5", "--seed", "3", "--out", str(out)]) == 0
    m = MeasurementSet.from_dict(json.loads(out.read_text()))
    assert m.noise_sigma == 0.5
    assert len(m.samples) == 16


def test_sweep_table(tmp_path, capsys):
    assert main(["sweep", "--scenario", "fig5", "--n", "1,2", *FAST, "--format", "table"]) == 0
    text = capsys.readouterr().out
    assert "1x1" in text and "2x2" in text and "GA+Newton" in text


def test_module_entry_point_deterministic(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        subprocess.run(
            [sys.executable, "-m", "hybridloc", "solve", "--scenario", "fig5", "--seed", "42", *FAST,
             "--no-timings", "--out", str(p)],
            check=True,
        )
    assert paths[0].read_bytes() == paths[1].read_bytes()


@pytest.mark.parametrize("argv", [[], ["solve"]])
def test_usage_errors(argv):
    assert main(argv) == 1
