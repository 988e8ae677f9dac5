"""
BlochID Command Line
Entry point run(argv) and its exit-code contract: 0 ok, 1 input error, 2 numerical failure
"""

import logging
import sys
from typing import List, Optional

from ..utils.errors import BlochIDError, NumericalFailure
from .handlers import HANDLERS
from .parser import UsageError, build_parser

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NUMERICAL_FAILURE = 2


def _one_line(error: Exception) -> str:
    return " ".join(str(error).split())


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse argv, dispatch to the subcommand handler and map errors to exit codes

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        0 on success, 1 on input/validation errors, 2 on numerical failures
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {_one_line(e)}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    try:
        HANDLERS[args.command](args)
    except NumericalFailure as e:
        logger.error(f"[CLI] {args.command} failed: {e}")
        print(f"numerical failure: {_one_line(e)}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    except (BlochIDError, ValueError, OSError) as e:
        print(f"error: {_one_line(e)}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return EXIT_OK


__all__ = ['run', 'build_parser', 'EXIT_OK', 'EXIT_INPUT_ERROR', 'EXIT_NUMERICAL_FAILURE']
