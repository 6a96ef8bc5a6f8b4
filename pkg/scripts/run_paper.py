#!/usr/bin/env python3
"""Run the full-scale profile (64 APs, 256 antennas, 10 users).

Equivalent to: cfmimo run --profile paper [--out DIR] [--seed N]
Expect a long run; use scripts/run_desk.py for a quick look.
"""

import sys

from cfmimo.cli import main

if __name__ == "__main__":
    sys.exit(main(["run", "--profile", "paper", "-v", *sys.argv[1:]]))
