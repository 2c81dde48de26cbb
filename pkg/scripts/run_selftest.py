#!/usr/bin/env python3
"""Run the randomized trial suites and write a JSONL report.

Thin wrapper around `sloccanon selftest` for use without an installed
entry point, e.g.:

    python3 scripts/run_selftest.py --count 50 --report trials.jsonl
"""

import sys

from sloccanon.cli import main

if __name__ == "__main__":
    sys.exit(main(["selftest"] + sys.argv[1:]))
