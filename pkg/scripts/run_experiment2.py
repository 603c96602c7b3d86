#!/usr/bin/env python3
"""GA-only accuracy and computing time over n*n restarts, against GA+Newton."""

import argparse
from pathlib import Path

from hybridloc.ga import GaConfig
from hybridloc.harness import DEFAULT_SWEEP, FULL_SWEEP, emit_report, run_experiment2
from hybridloc.newton import NewtonConfig
from hybridloc.scenario import fig5_scenario, load_scenario


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=None)
    parser.add_argument("--n", type=int, nargs="+", default=list(DEFAULT_SWEEP))
    parser.add_argument("--full", action="store_true", help="n = 10..80; expect many hours")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--outdir", type=Path, default=Path("results"))
    args = parser.parse_args()

    scenario = load_scenario(args.scenario) if args.scenario else fig5_scenario()
    n_list = FULL_SWEEP if args.full else args.n
    report = run_experiment2(scenario, n_list, GaConfig(rng_seed=args.seed), NewtonConfig())
    args.outdir.mkdir(parents=True, exist_ok=True)
    stem = args.outdir / f"experiment2_{scenario.name}_seed{args.seed}"
    emit_report(report, "csv", stem.with_suffix(".csv"))
    emit_report(report, "json", stem.with_suffix(".json"))
    print(emit_report(report, "table"))


if __name__ == "__main__":
    main()
