#!/usr/bin/env python3
"""Run the desk-scale experiment end to end and write all CSV outputs.

Equivalent to: cfmimo run --profile desk [--out DIR] [--seed N]
"""

import sys

from cfmimo.cli import main

if __name__ == "__main__":
    sys.exit(main(["run", "--profile", "desk", "-v", *sys.argv[1:]]))
