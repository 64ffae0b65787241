"""Measure how much the built-in randomness of a game decides its outcome"""
import sys

import seedfate.cli


def main():
    try:
        sys.exit(seedfate.cli.main())
    except (BrokenPipeError, KeyboardInterrupt):
        sys.exit(2)


if __name__ == "__main__":
    main()
