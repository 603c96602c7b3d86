import json
import math

import pytest

from hybridloc.ga import GaConfig
from hybridloc.harness import (
    CSV_COLUMNS,
    ExperimentReport,
    emit_report,
    format_fixed,
    report_from_json,
    report_to_csv,
    rows_from_csv,
    run_experiment1,
    run_experiment2,
)
from hybridloc.measurements import ConfigurationError, MeasurementSet
from hybridloc.model import Channel, recover_phi
from hybridloc.newton import NewtonConfig
from hybridloc.pipeline import Mode
from hybridloc.scenario import (
    fig5_scenario,
    load_scenario,
    save_scenario,
    synthesize_measurements,
    true_bearing,
)

SMALL = GaConfig(population_size=30, generations=30, restarts=2, rng_seed=3)

FIG5 = {
    0: (0.0, 0.0),
    1: (20000.0, 30000.0),
    2: (10000.0, 10000.0),
    3: (10000.0, 20000.0),
    4: (30000.0, 40000.0),
    5: (80000.0, 50000.0),
    6: (90000.0, 60000.0),
    7: (50000.0, 70000.0),
    8: (0.0, 60000.0),
}


def test_bundled_fig5_coordinates():
    sc = fig5_scenario()
    assert {r.id: (r.pose.x, r.pose.y) for r in sc.rovers} == FIG5
    assert sc.noise_sigma == 0.0


def test_scenario_round_trip(tmp_path):
    sc = fig5_scenario()
    path = tmp_path / "s.json"
    save_scenario(sc, path)
    assert load_scenario(path) == sc


def write(tmp_path, text):
    path = tmp_path / "scenario.json"
    path.write_text(text)
    return path


def test_load_scenario_errors(tmp_path):
    with pytest.raises(ConfigurationError, match="rover 0"):
        load_scenario(write(tmp_path, '{"rovers": [{"id": 1, "x": 5, "y": 5}]}'))
    with pytest.raises(ConfigurationError, match="duplicate"):
        load_scenario(
            write(tmp_path, '{"rovers": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 1, "y": 1}, {"id": 1, "x": 2, "y": 2}]}')
        )
    with pytest.raises(ConfigurationError, match="line 2"):
        load_scenario(write(tmp_path, '{\n  "rovers": [,\n}'))
    with pytest.raises(ConfigurationError, match=r"rovers\[1\]"):
        load_scenario(write(tmp_path, '{"rovers": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "y": 1}]}'))
    with pytest.raises(ConfigurationError, match="cannot read"):
        load_scenario(tmp_path / "missing.json")


def test_load_scenario_defaults(tmp_path):
    sc = load_scenario(write(tmp_path, '{"rovers": [{"id": 0, "x": 0, "y": 0}, {"id": 3, "x": 10, "y": 20}]}'))
    assert sc.noise_sigma == 0.0 and sc.seed == 0 and sc.name == "scenario"


def test_synthesized_bearing_round_trip():
    sc = fig5_scenario()
    m = synthesize_measurements(sc)
    for rover in sc.targets:
        phi = recover_phi(*m.pair(rover.id))
        # rover 8 sits on the y axis where arccos(-1 + eps) amplifies round-off
        tol = 1e-9 if rover.pose.x > 0 else 1e-7
        assert phi == pytest.approx(true_bearing(rover.pose), abs=tol)


def test_rover2_channels_equal():
    m = synthesize_measurements(fig5_scenario())
    aa, bb = m.pair(2)
    assert aa - bb == pytest.approx(0.0, abs=1e-12)


def test_noisy_synthesis_is_seeded():
    sc = fig5_scenario()
    sc.noise_sigma, sc.seed = 1.5, 77
    a = json.dumps(synthesize_measurements(sc).to_dict())
    b = json.dumps(synthesize_measurements(sc).to_dict())
    assert a == b
    sc.seed = 78
    assert json.dumps(synthesize_measurements(sc).to_dict()) != a
    clean = synthesize_measurements(fig5_scenario())
    assert MeasurementSet.from_dict(json.loads(a)).value((0, 3), Channel.AA) != clean.value((0, 3), Channel.AA)


def test_experiment1_structure_and_determinism():
    sc = fig5_scenario()
    r1 = run_experiment1(sc, SMALL, NewtonConfig(), Mode.GA_NEWTON, timings=False)
    r2 = run_experiment1(sc, SMALL, NewtonConfig(), Mode.GA_NEWTON, timings=False)
    assert len(r1.rows) == len(r1.ga_rows) == 8
    assert "mean_ga_relative_error" in r1.summary and "mean_newton_relative_error" in r1.summary
    assert report_to_csv(r1) == report_to_csv(r2)
    assert all(row.iterations is not None for row in r1.rows)
    assert all(row.status == "GaOnly" for row in r1.ga_rows)


def test_experiment2_structure():
    rep = run_experiment2(fig5_scenario(), [2, 4], SMALL)
    assert [row.label for row in rep.sweep] == ["2x2", "4x4", "GA+Newton"]
    assert [row.restarts for row in rep.sweep] == [4, 16, SMALL.restarts]
    assert all(row.seconds > 0 for row in rep.sweep)
    csv_text = emit_report(rep, "csv")
    assert csv_text.splitlines()[0] == "label,n,restarts,avg_rel_error,seconds"
    with pytest.raises(ValueError):
        run_experiment2(fig5_scenario(), [], SMALL)


def empty_report():
    return ExperimentReport(experiment="solve", scenario="none", seed=0, config={})


def test_empty_report_csv_is_header_only():
    assert report_to_csv(empty_report()) == ",".join(CSV_COLUMNS) + "\n"


@pytest.mark.parametrize(
    "value, text",
    [(0.0160055, "0.016006"), (0.0160065, "0.016006"), (0.0716420045, "0.071642"), (10000.0, "10000.000000"), (-1e-12, "0.000000")],
)
def test_format_fixed_round_half_even(value, text):
    assert format_fixed(value) == text


def test_json_round_trip_byte_stable(tmp_path):
    rep = run_experiment1(fig5_scenario(), SMALL, timings=False)
    path = tmp_path / "r.json"
    first = emit_report(rep, "json", path)
    again = emit_report(report_from_json(path.read_text()), "json")
    assert first == again


def test_csv_parses_back_at_serialization_precision(tmp_path):
    rep = run_experiment1(fig5_scenario(), SMALL, timings=False)
    path = tmp_path / "r.csv"
    text = emit_report(rep, "csv", path)
    assert "\r" not in path.read_text()
    parsed = rows_from_csv(text)
    assert len(parsed) == len(rep.rows)
    for a, b in zip(parsed, rep.rows):
        assert a.rover == b.rover and a.status == b.status and a.iterations == b.iterations
        for field in ("actual_x_mm", "actual_y_mm", "est_x_mm", "est_y_mm", "rel_error"):
            assert math.isclose(getattr(a, field), getattr(b, field), abs_tol=5e-7)


def test_table_render():
    rep = run_experiment1(fig5_scenario(), SMALL)
    text = emit_report(rep, "table")
    assert "Newton estimates" in text and "average newton relative error" in text


def test_emit_errors(tmp_path):
    with pytest.raises(ValueError):
        emit_report(empty_report(), "xml")
    with pytest.raises(OSError, match="nope"):
        emit_report(empty_report(), "csv", tmp_path / "nope" / "r.csv")
