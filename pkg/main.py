"""Compatibility wrapper for the replicability-audit CLI."""

import sys

from replicability.cli.main import main


if __name__ == "__main__":
    sys.exit(main())
