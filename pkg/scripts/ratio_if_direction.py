"""Search for univariate pairs where f/g maps the first quadrant into a target region
but the matching interlacing relation fails, and check each hit independently.

For P the hit is confirmed by a zero of f + y g with x and y both in the upper
half plane; for Psim by an r > 0 making f + r g non-real-rooted.
"""

import argparse

import numpy as np

from stablepoly import construct as C
from stablepoly.interlace import Region, Relation, check_relation, ratio_region_check
from stablepoly.polycore import UniPoly, evaluate, evaluation_scale
from stablepoly.stability import join_with_fresh_var
from stablepoly.uniroots import p_interlaces, real_rooted


def confirm_p(f: UniPoly, g: UniPoly) -> str:
    v = check_relation(f, g, Relation.P)
    if v.holds != "no" or v.witness is None:
        return "unconfirmed"
    J = join_with_fresh_var(f.to_multi(), g.to_multi())
    pt = [complex(z) for z in v.witness]
    rel = abs(evaluate(J, pt)) / evaluation_scale(J, pt)
    return f"zero at x={pt[0]:.4g}, y={pt[1]:.4g} (rel residual {rel:.1e})"


def confirm_psim(f: UniPoly, g: UniPoly) -> str:
    for r in np.logspace(-4, 4, 2001):
        if not real_rooted(f + g * float(r)):
            return f"f + {r:.4g} g has non-real roots"
    return "unconfirmed"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    rng = np.random.default_rng(a.seed)

    f, g = UniPoly.from_roots([-3.6, -1.8]), UniPoly.from_roots([-4.8])
    print("fixed pair f=(x+3.6)(x+1.8), g=x+4.8:",
          "ratio in Q1" if ratio_region_check(f, g, Region.Quadrant1) else "ratio leaves Q1", "|", confirm_p(f, g))

    hits = {"P": 0, "Psim": 0}
    for k in range(a.pairs):
        f = C.random_ppos1(int(rng.integers(1, 6)), rng)
        g = C.random_ppos1(max(f.degree - int(rng.integers(0, 2)), 1), rng)
        if ratio_region_check(f, g, Region.Quadrant1, seed=k) and not p_interlaces(f, g):
            hits["P"] += 1
            if hits["P"] <= 3:
                print(f"P    pair {k}: {confirm_p(f, g)}")
        if ratio_region_check(f, g, Region.OpenRHP, seed=k) and check_relation(f, g, Relation.Psim).holds == "no":
            hits["Psim"] += 1
            if hits["Psim"] <= 3:
                print(f"Psim pair {k}: {confirm_psim(f, g)}")
    print(f"{a.pairs} random Ppos_1 pairs: {hits}")


if __name__ == "__main__":
    main()
