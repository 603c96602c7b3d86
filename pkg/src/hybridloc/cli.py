"""Command line entry point: ``hybridloc {solve,sweep,synth}``.

Exit codes: 0 success, 1 configuration or parse error, 2 at least one rover
without a converged Newton estimate (the report is still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .ga import GaConfig
from .harness import DEFAULT_SWEEP, FULL_SWEEP, emit_report, run_experiment1, run_experiment2
from .measurements import ConfigurationError
from .model import ModelDomainError
from .newton import NewtonConfig
from .pipeline import Mode
from .scenario import Scenario, fig5_scenario, load_scenario, synthesize_measurements

log = logging.getLogger("hybridloc")

EXIT_OK, EXIT_CONFIG, EXIT_UNCONVERGED = 0, 1, 2


def _resolve_scenario(args) -> Scenario:
    path = Path(args.scenario)
    if not path.exists() and args.scenario == "fig5":
        scenario = fig5_scenario()
    else:
        scenario = load_scenario(path)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    if args.noise_sigma is not None:
        scenario = replace(scenario, noise_sigma=args.noise_sigma)
    return scenario


def _configs(args, scenario: Scenario) -> tuple[GaConfig, NewtonConfig]:
    try:
        ga = GaConfig(
            population_size=args.ga_pop,
            generations=args.ga_gens,
            crossover_rate=args.crossover_rate,
            mutation_rate=args.mutation_rate,
            restarts=args.restarts,
            bits_per_var=args.bits_per_var,
            rng_seed=scenario.seed,
        )
        newton = NewtonConfig(step_tolerance=args.newton_tol, max_iterations=args.newton_max_iter)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc
    return ga, newton


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)


def _n_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--n expects comma-separated integers, got {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("--n needs at least one positive integer")
    return values


def cmd_solve(args) -> int:
    scenario = _resolve_scenario(args)
    ga, newton = _configs(args, scenario)
    report = run_experiment1(scenario, ga, newton, Mode(args.mode), timings=not args.no_timings)
    _write(emit_report(report, args.format, args.out), args.out)
    if Mode(args.mode) is Mode.GA_NEWTON and report.has_unconverged:
        log.warning("at least one rover has no converged Newton estimate")
        return EXIT_UNCONVERGED
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = _resolve_scenario(args)
    ga, newton = _configs(args, scenario)
    n_list = list(FULL_SWEEP) if args.full else args.n
    report = run_experiment2(scenario, n_list, ga, newton, timings=not args.no_timings)
    _write(emit_report(report, args.format, args.out), args.out)
    return EXIT_UNCONVERGED if report.has_unconverged else EXIT_OK


def cmd_synth(args) -> int:
    scenario = _resolve_scenario(args)
    text = json.dumps(synthesize_measurements(scenario).to_dict(), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", required=True, help="scenario JSON path, or 'fig5' for the bundled layout")
    p.add_argument("--seed", type=int, default=None, help="overrides the scenario seed")
    p.add_argument("--noise-sigma", type=float, default=None, help="Gaussian RSSI noise in dBm")


def _add_solver(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ga-pop", type=int, default=100)
    p.add_argument("--ga-gens", type=int, default=200)
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--crossover-rate", type=float, default=0.9)
    p.add_argument("--mutation-rate", type=float, default=0.01)
    p.add_argument("--bits-per-var", type=int, default=24)
    p.add_argument("--newton-tol", type=float, default=1e-10)
    p.add_argument("--newton-max-iter", type=int, default=100)
    p.add_argument("--out", default=None, help="output file (stdout when omitted)")
    p.add_argument("--format", choices=["csv", "json", "table"], default="csv")
    p.add_argument("--no-timings", action="store_true", help="omit wall-clock fields")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridloc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="estimate every rover of a scenario")
    _add_common(solve)
    solve.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.GA_NEWTON.value)
    _add_solver(solve)
    solve.set_defaults(func=cmd_solve)

    sweep = sub.add_parser("sweep", help="GA-only accuracy/time over n*n restarts")
    _add_common(sweep)
    sweep.add_argument("--n", type=_n_list, default=list(DEFAULT_SWEEP), help="comma-separated n values")
    sweep.add_argument("--full", action="store_true", help="use n = 10, 20, ..., 80")
    _add_solver(sweep)
    sweep.set_defaults(func=cmd_sweep)

    synth = sub.add_parser("synth", help="dump the synthesized measurement set as JSON")
    _add_common(synth)
    synth.add_argument("--out", default=None)
    synth.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, ModelDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
