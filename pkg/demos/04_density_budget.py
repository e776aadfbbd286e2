"""The three-group bound on the Gram row sums.  The near groups depend only
on the density; the far group decays like cos(1/8)^{2k} k^2 and only drops
below the near groups for k in the thousands.

    python demos/04_density_budget.py --density 0.0025
"""

import argparse

from beamortho.gram import density_condition, density_lhs, theoretical_r


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--density", type=float, default=1 / 400)
    args = ap.parse_args()
    D = args.density
    print(f"D = {D}: (7 + 1296 D) e^(-1/(72 D)) = {density_lhs(D):.6f}, condition holds: {density_condition(D)}")
    print("\n      k    group I   group II    group III   r <= 1/24")
    for k in (200, 400, 800, 1600, 2000, 3000, 4000, 8000):
        r = theoretical_r(D, k)
        print(f"{k:7d}  {r.groupI:.3e}  {r.groupII:.3e}  {r.groupIII:11.3e}   {r.admissible}")


if __name__ == "__main__":
    main()
