from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import List, Optional, Sequence

from .commands import COMMANDS
from .utils.config import RunConfig, load_config, resolve_output_dir
from .utils.report import write_csv

logger = logging.getLogger(__name__)

# subcommands whose table is also printed
ECHOED = ("roots", "table1")


def _list(kind):
    def parse(values: Optional[Sequence[str]]):
        if values is None:
            return None
        out: List = []
        for value in values:
            out += [kind(part) for part in value.split(",") if part.strip()]
        return tuple(out)

    return parse


_floats = _list(float)
_ints = _list(int)


def _add_t_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t-min", type=float, help="first time of the sweep")
    p.add_argument("--t-max", type=float, help="last time of the sweep")
    p.add_argument("--t-count", type=int, help="number of sweep times")
    p.add_argument("--t-scale", choices=("log", "linear"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermoplate",
        # subcommand flags such as --t must not resolve as prefixes of --tol or --threads
        allow_abbrev=False,
        description="Fourier-side experiments for the thermoelastic plate equations.",
    )
    parser.add_argument("--config", help="flat key = value run configuration")
    parser.add_argument("--output", help="output directory (default $THERMOPLATE_OUTPUT_DIR or ./results)")
    parser.add_argument("--tol", type=float, help="relative quadrature tolerance")
    parser.add_argument("--threads", type=int, help="worker threads for sweeps")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    sub.add_parser("roots", help="roots and constants of the plate cubic")

    p = sub.add_parser("kernels", help="K0, K1, K2 on a (t, r) grid")
    p.add_argument("--t", nargs="+", dest="t_values")
    p.add_argument("--r", nargs="+", dest="r_values")
    p.add_argument("--mode", choices=("stabilized", "lagrange-sum"))

    p = sub.add_parser("profiles", help="J0..J3 on a (t, r) grid")
    p.add_argument("--t", nargs="+", dest="t_values")
    p.add_argument("--r", nargs="+", dest="r_values")

    for name, text in (
        ("norms", "inner-zone norms with their quadrature tolerance"),
        ("rates", "fitted large-time exponents"),
        ("profile-error", "profile error exponents"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--n", nargs="+", dest="dimensions")
        p.add_argument("--field", choices=("u", "theta"))
        p.add_argument("--preset")
        _add_t_grid(p)

    p = sub.add_parser("table1", help="growth/bounded/decay classification by dimension")
    p.add_argument("--n", nargs="+", dest="dimensions")

    p = sub.add_parser("singular-limit", help="error against the damped plate as eps -> 0")
    p.add_argument("--order", type=int, choices=(1, 2))
    p.add_argument("--n", nargs="+", dest="dimensions")
    p.add_argument("--eps", nargs="+", dest="eps_values")
    p.add_argument("--preset")
    p.add_argument("--l2", action="store_true", default=None, help="also report the L2 error")
    _add_t_grid(p)

    p = sub.add_parser("oracle-compare", help="closed forms against RK4")
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=("stabilized", "lagrange-sum"))

    p = sub.add_parser("thermo1d", help="reduced 1D thermoelastic system")
    p.add_argument("--alpha", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--g1", type=float, dest="gamma1")
    p.add_argument("--g2", type=float, dest="gamma2")
    p.add_argument("--r", nargs="+", dest="r_values")
    p.add_argument("--t", nargs="+", dest="t_values")
    p.add_argument("--preset")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    base = load_config(args.config) if args.config else RunConfig()
    given = vars(args)
    overrides = {
        "experiment": args.command,
        "output_dir": args.output,
        "tol": args.tol,
        "threads": args.threads,
        "dimensions": _ints(given.get("dimensions")),
        "eps_values": _floats(given.get("eps_values")),
        "t_values": _floats(given.get("t_values")),
        "r_values": _floats(given.get("r_values")),
    }
    for key in ("t_min", "t_max", "t_count", "t_scale", "preset", "field", "order", "l2", "mode", "seed",
                "alpha", "kappa", "gamma1", "gamma2"):
        overrides[key] = given.get(key)
    return base.merged(**overrides).validate()


def run(config: RunConfig) -> int:
    """Run one experiment and write ``<output>/<experiment>.csv``."""
    config.validate()
    header, rows = COMMANDS[config.experiment](config)
    path = os.path.join(resolve_output_dir(config), f"{config.experiment}.csv")
    text = write_csv(path, header, rows)
    if config.experiment in ECHOED:
        sys.stdout.write(text)
    print(path)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command is None and not args.config:
        parser.print_usage(sys.stderr)
        print("thermoplate: error: a COMMAND or --config is required", file=sys.stderr)
        return 2
    try:
        config = config_from_args(args)
        return run(config)
    except ValueError as exc:
        print(f"thermoplate: error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        name = args.command or "config run"
        logger.debug("numerical failure", exc_info=True)
        print(f"thermoplate {name}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
