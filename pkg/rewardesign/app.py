import argparse
import logging
import sys
from typing import List, Optional

from rewardesign.commands import bench, bounds, estimate, oracle, run, train
from rewardesign.core.errors import RewardDesignError
from rewardesign.core.settings import settings

logger = logging.getLogger("Rewardesign")


# -----------------------------------------------------
# SOTTOCOMANDI
# -----------------------------------------------------
COMMANDS = (bounds, estimate, oracle, train, run, bench)

# exit status
EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rewardesign",
        description="Interpretable reward design for constrained optimal control problems",
    )
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="logging level (default from settings)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(level=args.log_level.upper(), format=settings.LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")

    try:
        return args.handler(args)
    except RewardDesignError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
