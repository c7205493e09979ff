"""Gap between master-equation and mean-field <a>(t) as the coupling shrinks."""

import argparse

from bistab.params import SystemParams
from bistab.quantum import HilbertConfig, meanfield_discrepancy


def run(couplings, E, n_cavity, n_mirror, t_end):
    cfg = HilbertConfig(n_cavity, n_mirror)
    print("G,max_gap,terminal_gap")
    for G in couplings:
        rep = meanfield_discrepancy(SystemParams(G=G, E=E), cfg, t_end)
        print(f"{G:.9g},{rep.max_gap:.9g},{rep.terminal_gap:.9g}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--couplings", default="0.4,0.2,0.1,0.05,0.025")
    ap.add_argument("--E", type=float, default=0.1)
    ap.add_argument("--n-cavity", type=int, default=5)
    ap.add_argument("--n-mirror", type=int, default=6)
    ap.add_argument("--t-end", type=float, default=20.0)
    args = ap.parse_args()
    run([float(g) for g in args.couplings.split(",")], args.E,
        args.n_cavity, args.n_mirror, args.t_end)
