#!/usr/bin/env python3
"""Full residual certification sweep plus the velocity+1 negative control.

Prints a per-family summary and exits non-zero if any case fails or the
control does not fail hard enough.

    python scripts/certify_sweep.py [--tol 1e-8] [--control 1e-3] [--csv rows.csv]
"""

import argparse
import collections
import sys
import time

from cnoidal.cli import Table, to_csv
from cnoidal.verify import scan_case, sweep_cases


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--tol", type=float, default=1e-8)
    ap.add_argument("--control", type=float, default=1e-3,
                    help="the corrupted sweep must exceed this everywhere")
    ap.add_argument("--csv", help="write every row here")
    args = ap.parse_args(argv)

    cases = list(sweep_cases())
    worst = collections.defaultdict(float)
    weakest = collections.defaultdict(lambda: float("inf"))
    digits = collections.Counter()
    table = Table(["family", "p", "m", "alpha", "beta", "sign", "max_rel", "control_rel", "dps"])
    failures = 0
    t0 = time.perf_counter()
    for case in cases:
        good = scan_case(*case, tol=args.tol)
        bad = scan_case(*case, corrupt_velocity=True, tol=args.tol)
        fam = case[0].value
        worst[fam] = max(worst[fam], good.max_rel)
        weakest[fam] = min(weakest[fam], bad.max_rel)
        digits[good.dps or 16] += 1
        if good.max_rel > args.tol or bad.max_rel <= args.control:
            failures += 1
        fam_, p, m, alpha, beta, sign = case
        table.add(family=fam, p=p, m=m, alpha=alpha, beta=beta, sign=sign,
                  max_rel=good.max_rel, control_rel=bad.max_rel, dps=good.dps)
    elapsed = time.perf_counter() - t0

    print(f"{len(cases)} cases in {elapsed:.1f} s")
    print(f"{'family':<15s} {'worst max_rel':>14s} {'weakest control':>16s}")
    for fam in worst:
        print(f"{fam:<15s} {worst[fam]:14.2e} {weakest[fam]:16.2e}")
    print("digits used:", dict(sorted(digits.items())))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(to_csv(table))
    if failures:
        print(f"{failures} cases FAILED")
        return 1
    print("all cases certified")
    return 0


if __name__ == "__main__":
    sys.exit(main())
