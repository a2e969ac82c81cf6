"""Command line entry point: ``pointdefects run <config.json> [--check] [--out DIR] [--threads N]``."""
from __future__ import annotations

import argparse
import sys

from .core import ConfigError, PointDefectError
from .runner import THREADS_ENV, emit_report, load_config, run_scenario


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pointdefects",
                                     description="Run point-defect scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a JSON scenario and write its artifacts")
    run.add_argument("config", help="scenario JSON file")
    run.add_argument("--check", action="store_true",
                     help="exit with status 1 if any embedded check fails")
    run.add_argument("--out", metavar="DIR", help="output directory")
    run.add_argument("--threads", type=int, metavar="N",
                     help=f"worker threads (default: ${THREADS_ENV} or 1)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        art = run_scenario(cfg, out_dir=args.out, threads=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PointDefectError, OSError) as exc:
        print(f"run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(emit_report(art))
    if args.check and not art.passed:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
