import sys

from pyvalence.cli import run

sys.exit(run())
