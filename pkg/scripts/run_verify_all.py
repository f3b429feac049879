#!/usr/bin/env python3
"""Run every verification suite at desk scale and print one line per suite."""

import argparse
import sys
import time

from winfer.verify import SUITES, run_suite

SCALES = {
    "tv-oracle": 500,
    "chain": 2000,
    "pinsker": 1000,
    "bretagnolle-huber": 1000,
    "nfold": 50,
    "bregman-kl": 200,
    "kl-expansion": 10,
    "expfam-golden": 0,
}


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--scale", type=float, default=1.0,
                    help="multiplier on the per-suite instance counts")
    args = ap.parse_args()

    failures = 0
    for name in SUITES:
        n = int(SCALES[name] * args.scale)
        t0 = time.time()
        rep = run_suite(name, n, args.seed)
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status} {name:<20} instances={rep.instances:<6} "
              f"violations={len(rep.violations):<3} "
              f"hypothesis_failures={rep.hypothesis_failures:<4} "
              f"({time.time() - t0:.1f}s) {rep.margins}")
        if not rep.passed:
            failures += 1
            for v in rep.violations[:5]:
                print("    ", v)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
