"""When beams overlap, F moves away from the identity.  Shrinking the
spacing at fixed degree shows the Gram row sums, the size of F - I and
the L^p margins degrading together.

    python demos/03_coupled_family.py --k 60
"""

import argparse

from beamortho import build_gram, generate_poles, make_beam, orthonormalize
from beamortho.ortho import lp_table, verify_lp_lower_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--k", type=int, default=60)
    ap.add_argument("--m-list", default="4,8,16,32,48")
    args = ap.parse_args()

    print("   m    d_min     r_emp   |||F-I|||  min u_4/Q_4  ortho err")
    for m in (int(x) for x in args.m_list.split(",")):
        ps = generate_poles(m, seed=0)
        beams = [make_beam(args.k, f) for f in ps.frames()]
        G = build_gram(beams)
        os = orthonormalize(beams, G)
        rep = verify_lp_lower_bound(os, 4.0, table=lp_table(os, [4.0]))
        print(f"{m:4d}  {ps.d_min:7.4f}  {G.r_emp:9.2e}  {os.H_norm:9.2e}  {rep.margins.min():11.6f}  {os.ortho_error:9.1e}")


if __name__ == "__main__":
    main()
