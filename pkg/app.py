"""
hoising - higher-order Ising simulator and solver for hybrid SAT formulas

Verbs: expand, solve, trace, generate-ple, bench
"""
import argparse
import logging
import sys
from typing import Optional, Sequence

from commands import bench, expand, generate_ple, solve, trace
from utils.constants import DEFAULT_LOG_LEVEL, EXIT_INPUT_ERROR

COMMANDS = (expand, solve, trace, generate_ple, bench)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='hoising',
        description="Compile hybrid SAT formulas to higher-order Ising models and minimize their relaxations",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help="Debug logging")
    verbosity.add_argument('-q', '--quiet', action='store_true', help="Errors only")
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True
    for command in COMMANDS:
        command.add_parser(subparsers)
    return parser


def setup_logging(verbose: bool = False, quiet: bool = False):
    """Log to stderr so stdout carries only command output"""
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.ERROR
    else:
        level = getattr(logging, str(DEFAULT_LOG_LEVEL).upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 for --help
        return EXIT_INPUT_ERROR if e.code else 0

    setup_logging(args.verbose, args.quiet)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
