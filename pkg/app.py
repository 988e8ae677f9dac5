"""
BlochID - Which dephasing qubit model produced this trace?
Command-line entry point: python app.py <subcommand> [flags]
"""

import logging
import sys

from dotenv import load_dotenv

# Load environment variables before the package reads its defaults
load_dotenv()

from src.cli import run  # noqa: E402
from src.utils.config import get_log_level  # noqa: E402


def configure_logging() -> None:
    """Diagnostics go to stderr; standard output is reserved for data"""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
    logging.basicConfig(level=get_log_level(), handlers=[handler])


if __name__ == "__main__":
    configure_logging()
    sys.exit(run(sys.argv[1:]))
