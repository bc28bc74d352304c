"""CLI wrapper for the offline smoke pipeline."""

import sys

from tidkit.scripts.cli import main

if __name__ == "__main__":
    sys.exit(main(["smoke", *sys.argv[1:]]))
