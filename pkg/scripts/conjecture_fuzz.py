#!/usr/bin/env python3
"""Rest-point census over random proper three-grammar systems.

Samples advantage matrices through random region measures, counts rest
points and classifies interior ones.  The working hypotheses are that a
proper system has n or n+1 rest points and that interior rest points
are stable; this script reports the observed fractions and dumps any
counterexample in full so it can be replayed.

Usage: conjecture_fuzz.py [--trials N] [--seed S]
"""

import argparse
import json

from gramdyn import conjecture_explore


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    report = conjecture_explore(args.trials, seed=args.seed)
    counts = report.rest_point_counts
    frac = (counts["n"] + counts["n_plus_1"]) / args.trials

    print(f"{args.trials} random proper systems (seed {args.seed})")
    print(f"  n rest points:   {counts['n']}")
    print(f"  n+1 rest points: {counts['n_plus_1']}")
    print(f"  other:           {counts['other']}")
    print(f"  fraction with n or n+1: {frac:.3f}")
    print(f"  interior points: {report.interior_stable_count} stable, "
          f"{report.interior_unstable_count} unstable, "
          f"{report.interior_inconclusive_count} inconclusive")

    ces = report.as_dict()["counterexamples"]
    if ces:
        print(f"\n{len(ces)} counterexample(s):")
        for ce in ces:
            print(json.dumps(ce, sort_keys=True, indent=2))
    else:
        print("\nno counterexamples found")


if __name__ == "__main__":
    main()
