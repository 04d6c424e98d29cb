#!/usr/bin/env python3
"""Print the identity constants next to their known closed forms.

    python scripts/constants_table.py [--p-max 6] [--m 0 0.25 0.5 0.75 0.99]
"""

import argparse
import sys

from cnoidal.constants import Kind, closed_form, extract_constant, is_legal
from cnoidal.errors import CnoidalError


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--p-max", type=int, default=6)
    ap.add_argument("--m", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75, 0.99])
    args = ap.parse_args(argv)

    worst = 0.0
    print(f"{'kind':4s} {'p':>2s} {'m':>5s} {'value':>22s} {'dev':>9s} {'closed form':>22s}")
    for kind in Kind:
        if kind is Kind.Q:
            continue
        for p in range(1, args.p_max + 1):
            if not is_legal(kind, p):
                continue
            for m in args.m:
                try:
                    c = extract_constant(kind, p, m)
                except CnoidalError as e:
                    print(f"{kind.value:4s} {p:2d} {m:5.2f}  {e}")
                    continue
                exact = closed_form(kind, p, m)
                cf = "" if exact is None else f"{exact:22.15f}"
                if exact is not None:
                    worst = max(worst, abs(c.value - exact))
                print(f"{kind.value:4s} {p:2d} {m:5.2f} {c.value:22.15f} {c.constancy_dev:9.1e} {cf}")
    print(f"largest gap to a closed form: {worst:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
