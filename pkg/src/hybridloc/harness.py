"""Experiment orchestration and report serialization (CSV, JSON, terminal table)."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

from . import __version__
from .ga import GaConfig
from .newton import NewtonConfig
from .pipeline import EstimationResult, Mode, run_scenario
from .scenario import Scenario

CSV_COLUMNS = [
    "rover",
    "actual_x_mm",
    "actual_y_mm",
    "est_x_mm",
    "est_y_mm",
    "rel_error",
    "iterations",
    "status",
]
SWEEP_COLUMNS = ["label", "n", "restarts", "avg_rel_error", "seconds"]

DEFAULT_SWEEP = (2, 4, 8)
FULL_SWEEP = (10, 20, 30, 40, 50, 60, 70, 80)


@dataclass
class ReportRow:
    rover: int
    actual_x_mm: float
    actual_y_mm: float
    est_x_mm: float | None
    est_y_mm: float | None
    rel_error: float | None
    iterations: int | None
    status: str


@dataclass
class SweepRow:
    label: str
    n: int | None
    restarts: int
    avg_rel_error: float
    seconds: float | None


@dataclass
class ExperimentReport:
    experiment: str
    scenario: str
    seed: int
    config: dict
    version: str = __version__
    rows: list[ReportRow] = field(default_factory=list)
    ga_rows: list[ReportRow] = field(default_factory=list)
    sweep: list[SweepRow] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentReport:
        data = dict(data)
        data["rows"] = [ReportRow(**r) for r in data.get("rows", [])]
        data["ga_rows"] = [ReportRow(**r) for r in data.get("ga_rows", [])]
        data["sweep"] = [SweepRow(**r) for r in data.get("sweep", [])]
        return cls(**data)

    @property
    def has_unconverged(self) -> bool:
        return any(r.status not in ("ConvergedStep", "GaOnly") for r in self.rows)


def config_echo(ga_config: GaConfig, newton_config: NewtonConfig, mode: Mode) -> dict:
    return {
        "mode": Mode(mode).value,
        "ga": {**asdict(ga_config), "bounds": [list(b) for b in ga_config.bounds]},
        "newton": asdict(newton_config),
    }


def _ga_row(r: EstimationResult) -> ReportRow:
    est = r.ga_seed or (None, None)
    return ReportRow(
        rover=r.rover_index,
        actual_x_mm=r.actual.x,
        actual_y_mm=r.actual.y,
        est_x_mm=est[0],
        est_y_mm=est[1],
        rel_error=r.ga_relative_error if r.ga_seed is not None else None,
        iterations=None,
        status="GaOnly" if r.ga_seed is not None else "MeasurementInconsistent",
    )


def _newton_row(r: EstimationResult) -> ReportRow:
    if r.newton is None:
        row = _ga_row(r)
        row.status = "MeasurementInconsistent" if r.ga_seed is None else "NewtonSkipped"
        return row
    return ReportRow(
        rover=r.rover_index,
        actual_x_mm=r.actual.x,
        actual_y_mm=r.actual.y,
        est_x_mm=r.newton.solution[0],
        est_y_mm=r.newton.solution[1],
        rel_error=r.newton_relative_error,
        iterations=r.newton.iterations,
        status=r.newton.status.value,
    )


def run_experiment1(
    scenario: Scenario,
    ga_config: GaConfig,
    newton_config: NewtonConfig | None = None,
    mode: Mode = Mode.GA_NEWTON,
    timings: bool = True,
) -> ExperimentReport:
    """GA multi-start per rover, optionally refined by Newton.

    ``ga_rows`` hold the GA seeds; ``rows`` hold the final estimates (the
    Newton results in GA+Newton mode, otherwise the GA seeds again).
    """
    newton_config = newton_config or NewtonConfig()
    mode = Mode(mode)
    run = run_scenario(scenario, ga_config, newton_config, mode)
    ga_rows = [_ga_row(r) for r in run.results]
    rows = [_newton_row(r) for r in run.results] if mode is Mode.GA_NEWTON else list(ga_rows)
    summary = dict(run.summary)
    if timings:
        summary["ga_seconds"] = sum(r.timings.get("ga_seconds", 0.0) for r in run.results)
        summary["newton_seconds"] = sum(r.timings.get("newton_seconds", 0.0) for r in run.results)
    else:
        summary.pop("total_seconds", None)
    return ExperimentReport(
        experiment="solve",
        scenario=scenario.name,
        seed=ga_config.rng_seed,
        config=config_echo(ga_config, newton_config, mode),
        rows=rows,
        ga_rows=ga_rows,
        summary=summary,
    )


def run_experiment2(
    scenario: Scenario,
    n_list=DEFAULT_SWEEP,
    ga_config: GaConfig | None = None,
    newton_config: NewtonConfig | None = None,
    timings: bool = True,
) -> ExperimentReport:
    """GA-only accuracy and cost for n*n restarts, plus one GA+Newton row.

    The GA+Newton row uses ``ga_config.restarts``.
    """
    n_list = list(n_list)
    if not n_list:
        raise ValueError("n_list must not be empty")
    ga_config = ga_config or GaConfig(rng_seed=scenario.seed)
    newton_config = newton_config or NewtonConfig()
    sweep = []
    for n in n_list:
        cfg = GaConfig(**{**asdict(ga_config), "restarts": n * n})
        t0 = time.perf_counter()
        run = run_scenario(scenario, cfg, newton_config, Mode.GA_ONLY)
        elapsed = time.perf_counter() - t0
        sweep.append(
            SweepRow(f"{n}x{n}", n, n * n, run.summary["mean_ga_relative_error"], elapsed if timings else None)
        )
    t0 = time.perf_counter()
    run = run_scenario(scenario, ga_config, newton_config, Mode.GA_NEWTON)
    elapsed = time.perf_counter() - t0
    sweep.append(
        SweepRow(
            "GA+Newton", None, ga_config.restarts, run.summary["mean_newton_relative_error"],
            elapsed if timings else None,
        )
    )
    return ExperimentReport(
        experiment="sweep",
        scenario=scenario.name,
        seed=ga_config.rng_seed,
        config={**config_echo(ga_config, newton_config, Mode.GA_NEWTON), "n_list": n_list},
        rows=[_newton_row(r) for r in run.results],
        ga_rows=[_ga_row(r) for r in run.results],
        sweep=sweep,
    )


def format_fixed(value: float | None, places: int = 6) -> str:
    """Fixed-point text rounded half-to-even on the shortest decimal repr."""
    if value is None:
        return ""
    if not math.isfinite(value):
        return repr(float(value))
    quantum = Decimal(1).scaleb(-places)
    text = format(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_EVEN), "f")
    return "0." + "0" * places if text.startswith("-0") and Decimal(text) == 0 else text


def _row_cells(row: ReportRow) -> list[str]:
    return [
        str(row.rover),
        format_fixed(row.actual_x_mm),
        format_fixed(row.actual_y_mm),
        format_fixed(row.est_x_mm),
        format_fixed(row.est_y_mm),
        format_fixed(row.rel_error),
        "" if row.iterations is None else str(row.iterations),
        row.status,
    ]


def _sweep_cells(row: SweepRow) -> list[str]:
    return [
        row.label,
        "" if row.n is None else str(row.n),
        str(row.restarts),
        format_fixed(row.avg_rel_error),
        format_fixed(row.seconds),
    ]


def report_to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report.experiment == "sweep":
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows(_sweep_cells(r) for r in report.sweep)
    else:
        writer.writerow(CSV_COLUMNS)
        writer.writerows(_row_cells(r) for r in report.rows)
    return buf.getvalue()


def _opt_float(text: str) -> float | None:
    return float(text) if text != "" else None


def rows_from_csv(text: str) -> list[ReportRow]:
    """Parse a per-rover CSV back into rows (values at serialization precision)."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [
        ReportRow(
            rover=int(rec["rover"]),
            actual_x_mm=float(rec["actual_x_mm"]),
            actual_y_mm=float(rec["actual_y_mm"]),
            est_x_mm=_opt_float(rec["est_x_mm"]),
            est_y_mm=_opt_float(rec["est_y_mm"]),
            rel_error=_opt_float(rec["rel_error"]),
            iterations=int(rec["iterations"]) if rec["iterations"] else None,
            status=rec["status"],
        )
        for rec in reader
    ]


def report_to_json(report: ExperimentReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, allow_nan=True) + "\n"


def report_from_json(text: str) -> ExperimentReport:
    return ExperimentReport.from_dict(json.loads(text))


def _table(headers: list[str], body: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h) for i, h in enumerate(headers)]
    line = "-+-".join("-" * w for w in widths)
    out = [" | ".join(h.ljust(w) for h, w in zip(headers, widths)), line]
    out += [" | ".join(c.ljust(w) for c, w in zip(r, widths)) for r in body]
    return "\n".join(out)


def report_to_table(report: ExperimentReport) -> str:
    parts = [f"{report.experiment} | scenario {report.scenario} | seed {report.seed} | v{report.version}"]
    if report.experiment == "sweep":
        parts.append(_table(SWEEP_COLUMNS, [_sweep_cells(r) for r in report.sweep]))
    else:
        if report.config.get("mode") == Mode.GA_NEWTON.value:
            parts.append("GA estimates (Newton initial values)")
            parts.append(_table(CSV_COLUMNS, [_row_cells(r) for r in report.ga_rows]))
            parts.append("Newton estimates")
        parts.append(_table(CSV_COLUMNS, [_row_cells(r) for r in report.rows]))
        for key in ("mean_ga_relative_error", "mean_newton_relative_error"):
            if report.summary.get(key) is not None:
                value = report.summary[key]
                parts.append(f"average {key.split('_')[1]} relative error: {format_fixed(value)} ({value:.3e})")
    return "\n".join(parts) + "\n"


_EMITTERS = {"csv": report_to_csv, "json": report_to_json, "table": report_to_table}


def emit_report(report: ExperimentReport, fmt: str, path: str | Path | None = None) -> str:
    """Render ``report`` and write it to ``path`` (UTF-8, LF) when given."""
    try:
        text = _EMITTERS[fmt](report)
    except KeyError:
        raise ValueError(f"unknown report format {fmt!r}; expected one of {sorted(_EMITTERS)}") from None
    if path is not None:
        path = Path(path)
        try:
            with path.open("w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror}") from exc
    return text
