"""Command-line front end.

Subcommands: dim (dimension sweep), bounds (exact bound suite), a2
(slow-set volume report), induced (induced-expander verification), and
sweep-all (everything applicable to the family).  Exit codes: 0 when all
checks pass or are advisory, 1 when a mathematical bound is violated,
2 for configuration errors.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, parse_config
from .sweeps import cmd_a2, cmd_bounds, cmd_dim, cmd_induced, sweep_all

_COMMANDS = {
    "dim": (cmd_dim, "box-dimension sweep over the parameter grid"),
    "bounds": (cmd_bounds, "exact combinatorial bound verification"),
    "a2": (cmd_a2, "slow-set volume vs depth envelope report"),
    "induced": (cmd_induced, "induced expander construction and checks"),
    "sweep-all": (sweep_all, "run every applicable driver"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repeller-lab",
        description="numerical laboratory for expanding maps with holes")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_fn, help_text) in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH",
                       help="key = value config file (supports include)")
        p.add_argument("--seed", type=int, metavar="N",
                       help="override the config seed")
        p.add_argument("--out", metavar="DIR", help="output directory")
        p.add_argument("--jobs", type=int, default=1, metavar="N",
                       help="worker threads for sweep rows")
        p.add_argument("--cache", choices=("on", "off"), default="on",
                       help="reuse checksummed per-row results")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config) if args.config else {}
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.out is not None:
            cfg["out"] = args.out
        fn = _COMMANDS[args.command][0]
        return fn(cfg, jobs=args.jobs, cache=args.cache == "on")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
