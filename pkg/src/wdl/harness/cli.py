"""Command-line entry point: one subcommand per experiment shape.

    wdl bound-table   --config cfg.yaml --out results/
    wdl rate-sweep    --config cfg.yaml --out results/
    wdl train-compare --config cfg.yaml --out results/
    wdl ber           --config cfg.yaml --out results/
"""

from __future__ import annotations

import argparse
import sys

from ..exceptions import ConfigurationError
from .config import load_config
from .experiments import run_ber, run_bound_table, run_rate_sweep, run_train_compare

_RUNNERS = {
    "bound-table": run_bound_table,
    "rate-sweep": run_rate_sweep,
    "train-compare": run_train_compare,
    "ber": run_ber,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wdl",
        description="Wireless distributed learning robustness experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        cmd = sub.add_parser(name, help=f"run the {name} experiment")
        cmd.add_argument("--config", required=True, help="YAML config file")
        cmd.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except (ConfigurationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if config["experiment"] != args.command:
        print(
            f"error: config declares experiment {config['experiment']!r}, "
            f"but the {args.command!r} subcommand was invoked",
            file=sys.stderr,
        )
        return 2
    try:
        _RUNNERS[args.command](config, args.out)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
