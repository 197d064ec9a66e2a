"""Command-line entry point: ``qcherenkov <command> [options]``."""

import argparse
import configparser
import os
import sys

from . import __version__
from .errors import ConfigError
from .sweep import (
    any_not_converged,
    emit,
    load_preset,
    read_config,
    run_timescale_sweep,
    run_wigner_scan,
    validate,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3

PRESETS = {
    "fig2": run_wigner_scan,
    "fig3": run_timescale_sweep,
    "fig4": run_timescale_sweep,
    "fig5": run_timescale_sweep,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="qcherenkov", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("timescales", "wigner", "validate", *PRESETS):
        p = sub.add_parser(name)
        p.add_argument("--config", required=name in ("timescales", "wigner", "validate"),
                       help="scenario INI file (presets use the shipped file by default)")
        p.add_argument("--out", help="output file, stdout if omitted")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--jobs", type=int, help="worker processes")
        p.add_argument("--tol", type=float, help="relative quadrature tolerance")
        if name == "validate":
            p.add_argument("--kind", choices=("timescales", "wigner"), default="timescales")
    return parser


def _write(data, path):
    if path is None:
        try:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head); silence the flush at exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command in PRESETS and args.config is None:
            config = load_preset(args.command)
        else:
            config = read_config(args.config)
        if args.command == "validate":
            scenarios = validate(config, args.kind, tol=args.tol, jobs=args.jobs)
            for s in scenarios:
                print(f"{s.name}: ok ({len(s.values)} points)")
            return EXIT_OK
        runner = PRESETS.get(args.command) or {
            "timescales": run_timescale_sweep,
            "wigner": run_wigner_scan,
        }[args.command]
        table = runner(config, tol=args.tol, jobs=args.jobs)
    except ConfigError as exc:
        print(f"qcherenkov: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ValueError, configparser.Error) as exc:
        print(f"qcherenkov: cannot read configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _write(emit(table, args.format), args.out)
    return EXIT_NOT_CONVERGED if any_not_converged(table) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
