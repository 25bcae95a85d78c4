#!/usr/bin/env python3
"""Survey inequality margins over many seeded scenarios.

Useful for spotting checks whose certificates are nearly tight: run a few
hundred seeds and report, per check id, the distribution of margins."""

import argparse
from collections import defaultdict

import numpy as np

from wrp.verify import generate_scenario, run_scenario_checks


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--checks", default=None, help="comma-separated check ids")
    args = ap.parse_args()
    selection = args.checks.split(",") if args.checks else None

    margins = defaultdict(list)
    for seed in range(args.seeds):
        for rep in run_scenario_checks(generate_scenario(seed), selection):
            if rep.status != "skipped-precondition":
                margins[rep.check_id].append(rep.margin)
    for cid in sorted(margins):
        arr = np.array(margins[cid])
        print(
            f"{cid:60s} min {arr.min():+.3e}  median {np.median(arr):+.3e}  "
            f"max {arr.max():+.3e}"
        )


if __name__ == "__main__":
    main()
