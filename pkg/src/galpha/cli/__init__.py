"""``galpha`` command-line entry point."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from ..errors import GalphaError, ParameterError
from .commands import (
    cmd_convergence_space,
    cmd_convergence_time,
    cmd_cost_bench,
    cmd_solve,
    cmd_stability_scan,
)
from .config import SUBCOMMANDS, ConfigError, load_config

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

COMMANDS = {
    "convergence-space": cmd_convergence_space,
    "convergence-time": cmd_convergence_time,
    "stability-scan": cmd_stability_scan,
    "cost-bench": cmd_cost_bench,
    "solve": cmd_solve,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="galpha", description="Split generalized-alpha wave solver experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", metavar="FILE", help="JSON configuration document")
        sp.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key (value parsed as JSON when possible)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    try:
        cfg = load_config(args.command, args.config, args.overrides)
    except (ConfigError, TypeError) as exc:
        print(f"galpha: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            table = COMMANDS[args.command](cfg)
    except ParameterError as exc:
        print(f"galpha: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GalphaError, np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        print(f"galpha: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if cfg.output_path:
        table.write(cfg.output_path)
    else:
        sys.stdout.write(table.to_csv())
    return 0


if __name__ == "__main__":
    sys.exit(main())
