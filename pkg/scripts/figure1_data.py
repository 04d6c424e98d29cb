#!/usr/bin/env python3
"""KdV velocities b_1..b_4 against m, as CSV, plus a text sketch.

    python scripts/figure1_data.py [--beta 0] [--step 0.02] [--out fig1.csv]

No plotting library is needed; feed the CSV to any plotting tool.
"""

import argparse
import sys

import numpy as np

from cnoidal.cli import RunConfig, emit, run


def sketch(table, width=61):
    cols = [c for c in table.columns if c != "m"]
    vals = np.array([[row[c] for c in cols] for row in table.rows])
    lo, hi = vals.min(), vals.max()
    for row, v in zip(table.rows, vals):
        line = [" "] * width
        zero = int(round((0 - lo) / (hi - lo) * (width - 1)))
        if 0 <= zero < width:
            line[zero] = "|"
        for k, x in enumerate(v):
            line[int(round((x - lo) / (hi - lo) * (width - 1)))] = str(k + 1)
        print(f"m={row['m']:4.2f} " + "".join(line))
    print(f"       {lo:<10.2f}{'b_p':^{width - 20}s}{hi:>10.2f}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--beta", type=float, default=0.0)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--out", help="CSV file (default: print the sketch only)")
    args = ap.parse_args(argv)

    cfg = RunConfig("figure1", m_grid=(0.0, 1.0, args.step), beta=(args.beta,))
    table, status = run(cfg)
    if args.out:
        emit(table, "csv", args.out)
    sketch(table)
    b4 = np.array([row["b_4"] for row in table.rows])
    m = np.array([row["m"] for row in table.rows])
    k = int(np.flatnonzero(np.diff(np.sign(b4)))[0]) if np.any(np.diff(np.sign(b4))) else None
    if k is not None:
        # linear interpolation between the bracketing grid points
        m0 = m[k] - b4[k] * (m[k + 1] - m[k]) / (b4[k + 1] - b4[k])
        print(f"b_4 changes sign near m = {m0:.3f}")
    return status


if __name__ == "__main__":
    sys.exit(main())
