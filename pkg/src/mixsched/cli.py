"""Command-line entry point: ``mixsched simulate`` and ``mixsched sweep``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError, InvariantError
from .experiment import ExperimentConfig, emit_csv, replication_rows, run_experiment, write_csvs
from .policy import PolicyKind

EXIT_CONFIG = 2
EXIT_INVARIANT = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="print per-replication rows to stderr")
    parser = argparse.ArgumentParser(prog="mixsched", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[common], help="run one workload setting under one or more policies")
    sim.add_argument("--policy", action="append", choices=[p.value for p in PolicyKind],
                     help="repeatable; default: all seven")
    sim.add_argument("--lambda", dest="rate", type=float, default=1.0, help="arrival rate")
    sim.add_argument("--dist", choices=["exp", "pareto"], default="exp")
    sim.add_argument("--regular-fraction", type=float, default=0.5)
    sim.add_argument("--flows", type=int, default=10000)
    sim.add_argument("--reps", type=int, default=1)
    sim.add_argument("--delta", type=float, default=0.1)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", type=Path, help="CSV path (default: stdout)")

    sweep = sub.add_parser("sweep", parents=[common], help="run a full grid from a JSON config")
    sweep.add_argument("--config", type=Path, required=True)
    sweep.add_argument("--out", type=Path, required=True, help="output directory")
    return parser


def _simulate_config(args) -> ExperimentConfig:
    return ExperimentConfig(
        policies=args.policy or list(PolicyKind),
        regular_fractions=[args.regular_fraction],
        distributions=[args.dist],
        arrival_rates=[args.rate],
        flow_count=args.flows,
        repetitions=args.reps,
        base_seed=args.seed,
        delta=args.delta,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(message)s")
    try:
        if args.command == "simulate":
            config = _simulate_config(args)
        else:
            config = ExperimentConfig.from_json(args.config)
        results = run_experiment(config)
        if args.verbose:
            sys.stderr.write(replication_rows(results, config.base_seed))
        if args.command == "simulate":
            text = emit_csv(results)
            if args.out:
                args.out.write_text(text)
            else:
                sys.stdout.write(text)
        else:
            for path in write_csvs(results, args.out):
                print(path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return 0


if __name__ == "__main__":
    sys.exit(main())
