"""Scaled input-output curves for several detunings, written as CSV."""

import argparse
import sys

from bistab.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ratio", type=float, default=0.5, help="chi / Gamma")
    ap.add_argument("--detunings", default="-3,-2,-1")
    ap.add_argument("-o", "--output", default="fig1.csv")
    args = ap.parse_args()
    sys.exit(main(["fig1", "--ratio", str(args.ratio), "--output", args.output,
                   "--detunings", *args.detunings.split(",")]))
