#!/usr/bin/env python3
"""Run the matrix-kind comparison and the solver timing benchmark."""

import argparse
import sys
from pathlib import Path

from widescan.cli import main as widescan_main

ROOT = Path(__file__).resolve().parents[1]


def run(quick: bool) -> int:
    extra = ["--trials", "20"] if quick else []
    code = widescan_main(["run", str(ROOT / "configs" / "coherence_study.ini"), *extra])
    if code != 0:
        return code
    return widescan_main(["timing", str(ROOT / "configs" / "timing_table.ini"), *extra])


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="20 trials per point")
    sys.exit(run(parser.parse_args().quick))
