"""A single Gaussian beam: its L^p norms grow like k^{sigma(p)} and its
mass sits in a tube of width about k^{-1/2} with an erf profile.

    python demos/01_beam_profile.py --k-list 128,256,512,1024
"""

import argparse
import math

import numpy as np

from beamortho import north_beam, sigma
from beamortho.localize import beam_localization
from beamortho.quad import build_grid, lp_norm_converged


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--k-list", default="128,256,512,1024")
    ap.add_argument("--p", default="3,4,6")
    args = ap.parse_args()
    ks = [int(k) for k in args.k_list.split(",")]
    ps = [float(p) for p in args.p.split(",")]

    print("L^p norms of Q_k")
    print("     k " + "".join(f"   p={p:<6g}" for p in ps))
    table = []
    for k in ks:
        vals = lp_norm_converged(north_beam(k), ps, k).values
        table.append(vals)
        print(f"{k:6d} " + "".join(f"  {v:9.5f}" for v in vals))
    table = np.array(table)
    for j, p in enumerate(ps):
        slope = np.polyfit(np.log(ks), np.log(table[:, j]), 1)[0]
        print(f"slope p={p:g}: {slope:.4f}   (sigma = {sigma(p):.4f})")

    k = ks[-1]
    grid = build_grid(2 * k)
    print(f"\ntube mass of Q_{k} at w = c / sqrt(k)")
    print("    c   mass_in     erf(c)")
    for c in (0.25, 0.5, 1.0, 1.5, 2.0, 2.5):
        b = beam_localization(north_beam(k), c, grid)
        print(f"{c:5.2f}  {b.mass_in:.6f}  {math.erf(c):.6f}")


if __name__ == "__main__":
    main()
