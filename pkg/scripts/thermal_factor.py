"""Thermal average of the mirror displacement against both exponential factors."""

import argparse
import math

import numpy as np

from bistab.quantum import displacement_expectation

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cutoff", type=int, default=60)
    ap.add_argument("--kappa-max", type=float, default=1.5)
    ap.add_argument("--nbar", default="0,0.5,1,2,3")
    args = ap.parse_args()
    print("nbar,kappa,truncated_sum,closed_form,error,transform_factor,tail_mass")
    for nbar in (float(x) for x in args.nbar.split(",")):
        for kappa in np.linspace(0.0, args.kappa_max, 7):
            r = displacement_expectation(kappa, nbar, args.cutoff, tail_tol=math.inf)
            print(f"{nbar:g},{kappa:.9g},{r.truncated_sum:.12g},{r.closed_form:.12g},"
                  f"{r.error:.3g},{r.paper_factor:.9g},{r.tail_mass:.3g}")
