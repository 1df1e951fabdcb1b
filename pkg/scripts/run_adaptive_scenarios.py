#!/usr/bin/env python3
"""Run the forecast-driven budget scenario and the cooperative voting rounds."""

import argparse
import sys
from pathlib import Path

from widescan.cli import main as widescan_main

ROOT = Path(__file__).resolve().parents[1]


def run(quick: bool) -> int:
    cdf_extra = ["--trials", "40"] if quick else []
    code = widescan_main(
        ["run", str(ROOT / "configs" / "miss_detect_cdf.ini"), *cdf_extra]
    )
    if code != 0:
        return code
    coop_extra = ["--trials", "20"] if quick else []
    return widescan_main(
        ["run", str(ROOT / "configs" / "cooperative_round.ini"), *coop_extra]
    )


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="reduced window counts")
    sys.exit(run(parser.parse_args().quick))
