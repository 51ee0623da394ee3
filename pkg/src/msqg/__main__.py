"""Module execution entry point, so ``python -m msqg`` matches the ``msqg`` script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
