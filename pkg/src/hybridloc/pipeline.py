"""Per-rover estimation: bearing from the AA/BB difference, GA seed, Newton refinement."""

from __future__ import annotations

import enum
import math
import statistics
import time
from dataclasses import dataclass, field, replace

from .ga import GaConfig, multi_start
from .measurements import ConfigurationError, MeasurementSet
from .model import MeasurementInconsistencyError, ModelDomainError, Pose2D, recover_phi
from .newton import NewtonConfig, NewtonOutcome, newton_solve
from .scenario import Scenario, synthesize_measurements


class Mode(str, enum.Enum):
    GA_ONLY = "ga"
    GA_NEWTON = "ga-newton"


def relative_error(actual: Pose2D | tuple[float, float], estimated: tuple[float, float]) -> float:
    """|d - d'| / d with d, d' the distances of actual and estimate from the origin."""
    ax, ay = (actual.x, actual.y) if isinstance(actual, Pose2D) else actual
    d = math.hypot(ax, ay)
    if d == 0.0:
        raise ModelDomainError("relative error undefined for a rover at the origin")
    return abs(d - math.hypot(*estimated)) / d


@dataclass
class EstimationResult:
    rover_index: int
    actual: Pose2D
    ga_seed: tuple[float, float] | None
    ga_relative_error: float
    ga_fitness: float
    newton: NewtonOutcome | None
    newton_relative_error: float | None
    phi_used: float | None
    timings: dict[str, float] = field(default_factory=dict)
    error: str | None = None

    @property
    def estimate(self) -> tuple[float, float] | None:
        if self.newton is not None:
            return self.newton.solution
        return self.ga_seed

    @property
    def final_relative_error(self) -> float:
        if self.newton_relative_error is not None:
            return self.newton_relative_error
        return self.ga_relative_error


def estimate_rover(
    measured: MeasurementSet,
    rover_index: int,
    actual: Pose2D,
    ga_config: GaConfig,
    newton_config: NewtonConfig | None = None,
    mode: Mode = Mode.GA_NEWTON,
) -> EstimationResult:
    """Estimate one rover; solver and measurement failures land in ``error``.

    Missing measurement channels are a configuration problem and raise.
    """
    mode = Mode(mode)
    newton_config = newton_config or NewtonConfig()
    r_aa, r_bb = measured.pair(rover_index)
    timings = {}
    failed = EstimationResult(
        rover_index=rover_index,
        actual=actual,
        ga_seed=None,
        ga_relative_error=math.nan,
        ga_fitness=math.nan,
        newton=None,
        newton_relative_error=None,
        phi_used=None,
        timings=timings,
    )
    try:
        phi = recover_phi(r_aa, r_bb)
    except MeasurementInconsistencyError as exc:
        failed.error = str(exc)
        return failed

    t0 = time.perf_counter()
    ga = multi_start(ga_config, phi, (r_aa, r_bb), rover=rover_index)
    timings["ga_seconds"] = time.perf_counter() - t0
    result = replace(
        failed,
        ga_seed=ga.best_candidate,
        ga_relative_error=relative_error(actual, ga.best_candidate),
        ga_fitness=ga.best_fitness,
        phi_used=phi,
    )
    if mode is Mode.GA_ONLY:
        return result

    t0 = time.perf_counter()
    if ga.best_candidate == (0.0, 0.0):
        result.error = "GA seed is the origin; Newton step undefined"
        return result
    outcome = newton_solve(ga.best_candidate, phi, r_aa, newton_config)
    timings["newton_seconds"] = time.perf_counter() - t0
    result.newton = outcome
    if all(math.isfinite(v) for v in outcome.solution):
        result.newton_relative_error = relative_error(actual, outcome.solution)
    else:
        result.newton_relative_error = math.nan
    if not outcome.converged:
        result.error = f"Newton stopped with {outcome.status.value}"
    return result


@dataclass
class ScenarioRun:
    results: list[EstimationResult]
    summary: dict


def _mean(values: list[float]) -> float:
    finite = [v for v in values if v is not None and math.isfinite(v)]
    return statistics.fmean(finite) if finite else math.nan


def check_targets(scenario: Scenario) -> None:
    for rover in scenario.targets:
        if rover.pose.x < 0 or rover.pose.y < 0:
            raise ConfigurationError(
                f"rover {rover.id} at ({rover.pose.x}, {rover.pose.y}) is outside the first "
                "quadrant; the bearing formulation only covers x >= 0, y >= 0"
            )
        if rover.pose.heading != 0.0:
            raise ConfigurationError(
                f"rover {rover.id} has heading {rover.pose.heading}; all rovers must share heading 0"
            )


def run_scenario(
    scenario: Scenario,
    ga_config: GaConfig,
    newton_config: NewtonConfig | None = None,
    mode: Mode = Mode.GA_NEWTON,
    measured: MeasurementSet | None = None,
) -> ScenarioRun:
    """Estimate every non-origin rover independently, ordered by rover id."""
    if not any(r.id == 0 for r in scenario.rovers):
        raise ConfigurationError("scenario needs rover 0 at the origin")
    if not scenario.targets:
        raise ConfigurationError("scenario has no target rovers")
    check_targets(scenario)
    mode = Mode(mode)
    if measured is None:
        measured = synthesize_measurements(scenario)

    t0 = time.perf_counter()
    results = [
        estimate_rover(measured, rover.id, rover.pose, ga_config, newton_config, mode)
        for rover in sorted(scenario.targets, key=lambda r: r.id)
    ]
    summary = {
        "mean_ga_relative_error": _mean([r.ga_relative_error for r in results]),
        "mean_newton_relative_error": (
            _mean([r.newton_relative_error for r in results]) if mode is Mode.GA_NEWTON else None
        ),
        "n_rovers": len(results),
        "n_failed": sum(r.error is not None for r in results),
        "total_seconds": time.perf_counter() - t0,
    }
    return ScenarioRun(results=results, summary=summary)
