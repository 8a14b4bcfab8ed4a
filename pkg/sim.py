# sim.py
import argparse
import importlib
import logging
import sys

from csd import __version__

# --- Logging ---
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# --- Command modules (each exposes setup(subparsers)) ---
COMMANDS = (
    "commands.campaign",
    "commands.inspect",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim", description="Single-cell D2D resource allocation simulator.")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        importlib.import_module(name).setup(subparsers)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    logger.debug(f"[sim] {args.command} {vars(args)}")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
