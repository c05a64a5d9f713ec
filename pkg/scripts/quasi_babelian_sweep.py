#!/usr/bin/env python3
"""Orbit sweep over the asymmetry ratio of a quasi-uniform system.

One grammar is penalized at rate rho relative to the common rate of the
other two.  Below the threshold the limit is an interior point whose
first coordinate follows 1/(5 - 2 rho); above it the first grammar
takes over.  Emits plot-ready CSV (rho, p1, p2, p3, converged) and
prints the estimated threshold.

Usage: quasi_babelian_sweep.py [--out sweep.csv]
"""

import argparse
import csv
import sys

import numpy as np

from gramdyn import bifurcation_sweep

A = 0.1
RHO_START, RHO_STOP, RHO_STEP = 0.05, 3.0, 0.01
BURN_IN = 10_000


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", help="write CSV here instead of stdout")
    args = ap.parse_args(argv)

    count = round((RHO_STOP - RHO_START) / RHO_STEP) + 1
    grid = RHO_START + RHO_STEP * np.arange(count)
    diagram = bifurcation_sweep(A, grid, burn_in=BURN_IN)
    limits = diagram.limits()

    sink = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(sink)
        w.writerow(["rho", "p1", "p2", "p3", "converged"])
        for rho, row, ok in zip(grid, limits, diagram.converged):
            w.writerow([f"{rho:.2f}"] + [f"{x:.12g}" for x in row] + [int(ok)])
    finally:
        if args.out:
            sink.close()

    unconverged = grid[~np.asarray(diagram.converged)]
    print(f"bifurcation estimate: rho = {diagram.bifurcation_estimate:.2f}",
          file=sys.stderr)
    if unconverged.size:
        vals = ", ".join(f"{r:.2f}" for r in unconverged)
        print(f"no settled limit within burn-in at rho = {vals}", file=sys.stderr)


if __name__ == "__main__":
    main()
