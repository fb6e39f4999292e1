"""Command line entry point.

Exit codes: 0 success, 1 invariant or validation failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import KEYS, ConfigError, parse_config
from .oracle import OracleMismatchError
from .runs import run_dispersion, run_lattice_otoc, run_otoc, run_rectify
from .validate import run_validate

EXIT_OK, EXIT_FAILURE, EXIT_CONFIG = 0, 1, 2

RUNNERS = {
    "dispersion": (run_dispersion, "nonreciprocal band omega(+-D, k) and group velocities"),
    "otoc": (run_otoc, "left/right OTOC time series over the Bragg mode set"),
    "rectify": (run_rectify, "rectification coefficient R(D) sweep"),
    "lattice-otoc": (run_lattice_otoc, "exact-oracle OTOC next to the propagator formula"),
}


def _common_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", type=Path, default=default, help="key = value configuration file")
    parser.add_argument("--out", type=Path, default=default, help="output file (default: stdout)")
    parser.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="emit JSON instead of CSV")
    parser.add_argument("-v", "--verbose", action="count",
                        default=argparse.SUPPRESS if suppress else 0,
                        help="log resolved parameters and their sources")
    keys = parser.add_argument_group("parameters (override the configuration file)")
    for key, (section, _, _) in KEYS.items():
        keys.add_argument(f"--{key.replace('_', '-')}", dest=f"key_{key}", metavar="VALUE",
                          default=argparse.SUPPRESS, help=f"[{section}] {key}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qidiode",
        description="Quantum information diode: magnon dispersion, OTOCs and rectification.")
    _common_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in RUNNERS.items():
        _common_flags(sub.add_parser(name, help=help_text), suppress=True)
    _common_flags(sub.add_parser("validate", help="run the full invariant suite"), suppress=True)
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head)
            sys.stdout = None
    else:
        out.write_text(text, encoding="utf-8", newline="\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    overrides = {name[4:]: value for name, value in vars(args).items()
                 if name.startswith("key_")}
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        config = parse_config(text, overrides)
    except (OSError, ConfigError) as exc:
        print(f"qidiode: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        report = run_validate(config)
        _emit(report.to_json(), args.out)
        for failure in report.failures:
            print(f"FAILED {failure.name}: {failure.detail}", file=sys.stderr)
        return EXIT_OK if report.passed else EXIT_FAILURE

    runner = RUNNERS[args.command][0]
    try:
        table = runner(config)
    except OracleMismatchError as exc:
        print(f"qidiode: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as exc:
        print(f"qidiode: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(table.to_json() if args.json else table.to_csv(), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
