from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from soficlab import __version__
from soficlab.cli.config import ConfigError, load_config
from soficlab.cli.runner import run_experiment
from soficlab.export import emit_csv, write_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FAILED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soficlab",
        description="Run sofic-dynamics experiments described by JSON configs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Log search sweeps and other debug output"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run an experiment and write its report")
    run.add_argument("config", type=Path, help="Experiment config (JSON)")
    run.add_argument("--out", type=Path, help="Report path; stdout when omitted")
    run.add_argument("--csv", type=Path, help="Trace CSV path (trace op only)")
    run.add_argument(
        "-j", "--jobs", type=int, default=1, help="Worker threads; never changes results"
    )

    validate = commands.add_parser("validate", help="Check a config without running it")
    validate.add_argument("config", type=Path, help="Experiment config (JSON)")
    return parser


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        stream=sys.stderr,
        force=True,
    )


def validate(path: Path) -> int:
    """Parse and build a config without running it; prints "ok" on success."""
    try:
        config = load_config(path)
        config.build()
    except ConfigError as e:
        logger.error(f"Invalid config {path}: {e}")
        return EXIT_INVALID
    for warning in config.warnings():
        logger.warning(f"Warning: {warning}")
    print("ok")
    return EXIT_OK


def run(path: Path, out: Path | None = None, csv: Path | None = None, jobs: int = 1) -> int:
    """Run one config and write its report.

    Returns:
        int: 0 on success, 2 when the config does not validate, 3 when the run fails.
    """
    try:
        if jobs < 1:
            raise ConfigError("--jobs", f"must be positive, got {jobs}")
        config = load_config(path)
        if csv is not None and config.op != "trace":
            raise ConfigError("--csv", f"only the trace op writes CSV, not {config.op!r}")
        experiment = config.build()
    except ConfigError as e:
        logger.error(f"Invalid config {path}: {e}")
        return EXIT_INVALID
    for warning in config.warnings():
        logger.warning(f"Warning: {warning}")

    try:
        report = run_experiment(experiment, jobs)
        if out is None:
            sys.stdout.write(report.to_json())
        else:
            write_report(report, out)
        if csv is not None:
            emit_csv(report.result, csv)
    except Exception:
        logger.exception(f"Run of {path} failed")
        return EXIT_FAILED
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    if args.command == "validate":
        return validate(args.config)
    return run(args.config, args.out, args.csv, args.jobs)


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()
