"""``python -m thermoplate`` runs one experiment and exits with its status."""
import sys

from .app import main

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
