#!/usr/bin/env python3
"""Run the two error-curve experiments: NMSE vs SNR and error gain vs m.

Full-size sweeps take a few minutes; pass --quick for a 20-trial smoke run.
"""

import argparse
import sys
from pathlib import Path

from widescan.cli import main as widescan_main

ROOT = Path(__file__).resolve().parents[1]


def run(quick: bool) -> int:
    extra = ["--trials", "20"] if quick else []
    for name in ("nmse_vs_snr", "error_gain_vs_m"):
        code = widescan_main(["run", str(ROOT / "configs" / f"{name}.ini"), *extra])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="20 trials per point")
    sys.exit(run(parser.parse_args().quick))
