# -*- coding: utf-8 -*-
"""Command line driver.

Exit codes: 0 on success (a detected and recorded divergence counts as
success), 2 for usage or configuration errors, 1 for anything else.
"""
import argparse
import os
import sys

from pydantic import ValidationError

from tclplus import logger
from tclplus.api.expansion import MAX_TERM_ORDER
from tclplus.api.lib import load_json_config
from tclplus.api.simulation_manager import SimulationManager
from tclplus.exceptions import ConfigError, InvalidOrder, TclPlusError
from tclplus.logger import log
from tclplus.settings import (
    IsingSimulationSettings,
    JcSimulationSettings,
    SingleMatrixSettings,
    SweepSettings,
)
from tclplus.version import __version__

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2

SIMULATION_SCHEMAS = {
    "jc": JcSimulationSettings,
    "ising": IsingSimulationSettings,
}

CONVERGENCE_SCHEMAS = {
    "sweep": SweepSettings,
    "single": SingleMatrixSettings,
}


def _non_negative_int(value):
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return number


def _positive_int(value):
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def _order(value):
    number = _positive_int(value)
    if number > MAX_TERM_ORDER:
        raise argparse.ArgumentTypeError(f"order must be <= {MAX_TERM_ORDER}, got {value}")
    return number


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tclplus",
        description="TCL and TCL+ master equation experiments",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=_non_negative_int, default=None,
                        help="Seed for random ensembles (default: config value or 0)")
    parser.add_argument("--out-dir", default=".", help="Directory for output files")
    parser.add_argument("--threads", type=_positive_int, default=1,
                        help="Worker threads for independent runs")
    parser.add_argument("--log-level", default=None,
                        help="Override TCLPLUS_LOG_LEVEL for this run (e.g. DEBUG)")
    sub = parser.add_subparsers(dest="command", required=True)

    expand = sub.add_parser("expand", help="Write TCL or TCL+ term tables as JSON")
    expand.add_argument("--order", type=_order, required=True)
    expand.add_argument("--method", choices=("tcl", "tclplus"), required=True)
    expand.add_argument("--series-depth", type=_non_negative_int, default=None,
                        help="Truncate the pseudoinverse series (tclplus only)")
    expand.add_argument("--out", default=None, help="Output JSON path")

    simulate = sub.add_parser("simulate", help="Integrate a model and write trajectories")
    simulate.add_argument("model", choices=tuple(SIMULATION_SCHEMAS))
    simulate.add_argument("config", nargs="?", default=None,
                          help="JSON config; defaults are used when omitted")
    simulate.add_argument("--out", default=None, help="Output directory (overrides --out-dir)")

    convergence = sub.add_parser("convergence", help="Series convergence analyses")
    convergence.add_argument("mode", choices=tuple(CONVERGENCE_SCHEMAS))
    convergence.add_argument("config", nargs="?", default=None)
    convergence.add_argument("--out", default=None, help="Output directory (overrides --out-dir)")
    return parser


def load_settings(schema, path):
    data = {} if path is None else load_json_config(path)
    return schema.model_validate(data)


def _report_validation(e):
    for err in e.errors():
        where = ".".join(str(p) for p in err["loc"]) or "<root>"
        sys.stderr.write(f"config error: {where}: {err['msg']}\n")


def run(args):
    out_dir = getattr(args, "out", None) if args.command != "expand" else None
    out_dir = out_dir or args.out_dir
    manager = SimulationManager(out_dir, threads=args.threads, seed=args.seed)

    if args.command == "expand":
        if args.series_depth is not None and args.method != "tclplus":
            raise ConfigError("--series-depth only applies to --method tclplus")
        out = args.out or os.path.join(args.out_dir, f"terms_{args.method}_order{args.order}.json")
        return manager.expand(args.order, args.method, args.series_depth, out)
    if args.command == "simulate":
        settings = load_settings(SIMULATION_SCHEMAS[args.model], args.config)
        return manager.simulate(args.model, settings)
    settings = load_settings(CONVERGENCE_SCHEMAS[args.mode], args.config)
    if args.mode == "sweep":
        return manager.convergence_sweep(settings)
    return manager.convergence_single(settings)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if args.log_level:
        logger.set_level(args.log_level)

    try:
        run(args)
    except ValidationError as e:
        _report_validation(e)
        return EXIT_USAGE
    except (ConfigError, InvalidOrder) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except TclPlusError as e:
        log.error(f"{args.command} failed: {e}")
        return EXIT_INTERNAL
    except Exception as e:
        log.exception(f"Unexpected error in {args.command}: {e}")
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
