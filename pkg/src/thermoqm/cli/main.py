"""Command-line entry point.

    thermoqm <subcommand> --config cfg.json [--out DIR] [--format csv|report]

Exit codes: 0 success, 2 configuration error, 3 numerical
non-convergence (including an insufficient spectrum truncation),
4 failed internal consistency check, 5 I/O error.
"""
from __future__ import annotations

import argparse
import hashlib
import logging
import sys

from .. import __version__
from ..errors import (ConfigError, ConsistencyError, ConvergenceError, TailBoundError,
                      UnsupportedInteractionError)
from . import runs
from .config import load_config
from .output import emit, write_meta

log = logging.getLogger("thermoqm")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CONSISTENCY, EXIT_IO = 0, 2, 3, 4, 5

SUBCOMMANDS = {
    "spectrum": "zero-temperature levels of the configured potential",
    "thermal": "self-consistent levels, probabilities and sqrt(Z) per temperature",
    "shift": "transition-frequency shifts between temperature pairs",
    "evolve": "time evolution of a level or a superposition",
    "oscillator": "closed-form harmonic-oscillator tables",
    "ensemble": "U, F, S of a microstate ensemble and the F = U - T S check",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON run configuration")
    common.add_argument("--out", default=None,
                        help="output directory (default: config output.directory or '.')")
    common.add_argument("--format", choices=("csv", "report"), default=None)
    parser = argparse.ArgumentParser(prog="thermoqm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"thermoqm {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in SUBCOMMANDS.items():
        sub.add_parser(name, parents=[common], help=helptext)
    return parser


def _tables(command: str, cfg):
    if command == "spectrum":
        return [runs.run_spectrum(cfg)], {}
    if command == "thermal":
        return [runs.run_thermal(cfg)], {}
    if command == "shift":
        return [runs.run_shift(cfg)], {}
    if command == "evolve":
        setup = runs.evolution_setup(cfg)
        tables = list(runs.run_evolve(cfg, setup))
        checks = {}
        beat = runs.beat_check(cfg, setup)
        if beat is not None:
            checks["beat"] = beat
        norms = tables[1].column("norm")
        checks["max_norm_error"] = max(abs(n - 1.0) for n in norms)
        return tables, checks
    if command == "oscillator":
        return [runs.run_oscillator(cfg)], {}
    if command == "ensemble":
        return list(runs.run_ensemble(cfg)), {}
    raise ValueError(command)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        cfg, raw = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = args.out or cfg.output.directory or "."
    fmt = args.format or cfg.output.format
    try:
        tables, checks = _tables(args.command, cfg)
    except (ConvergenceError, TailBoundError) as exc:
        # before ValueError: TailBoundError is one
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, UnsupportedInteractionError, ValueError, IndexError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConsistencyError as exc:
        print(f"consistency check failed: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY

    meta = {
        "tool": "thermoqm",
        "version": __version__,
        "subcommand": args.command,
        "config_sha256": hashlib.sha256(raw).hexdigest(),
        "format": fmt,
        "tolerances": cfg.tolerances.model_dump(),
        "outputs": [],
    }
    if checks:
        meta["checks"] = checks
    try:
        for table in tables:
            path = emit(table, out_dir, fmt)
            meta["outputs"].append(path.name)
            log.info("wrote %s (%d rows)", path, len(table.rows))
        write_meta(meta, out_dir)
    except OSError as exc:
        where = exc.filename or out_dir
        print(f"I/O error: {where}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
