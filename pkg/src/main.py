import sys

from src.cli.router import run
from src.utils.log_config import configure_logging


def main() -> None:
    configure_logging()
    sys.exit(run())


if __name__ == "__main__":
    main()
