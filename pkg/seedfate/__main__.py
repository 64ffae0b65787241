"""Main module (invoked by "python3 -m seedfate")"""
import sys

import seedfate.cli

try:
    sys.exit(seedfate.cli.main())
except (BrokenPipeError, KeyboardInterrupt):
    sys.exit(2)
