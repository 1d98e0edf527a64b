"""Residue-disk bounds on the product of three elliptic formal groups.

Draws random directions u in Z_p^3, finds the first degree N at which the chosen
coordinate of Exp(z u) has a unit coefficient, and tabulates the resulting bound
(N - lam)/(1 - lam) next to the order of the reduced jet inside the coordinate
hyperplane.  The third coordinate of Exp(z u) starts with u3 z, so a unit u3 gives
N = 1 and jet order 0.  When p divides u3 every coefficient below degree p is
divisible by p, the search finds no unit and the run is reported as inconclusive.
"""

import argparse
import random
from collections import Counter

from chabsurf import fgroup, jetint
from chabsurf.presets import product_elliptic
from chabsurf.rings import LocalFieldParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=7)
    ap.add_argument("--trials", type=int, default=40)
    ap.add_argument("--order", type=int, default=6)
    ap.add_argument("--seed", type=int, default=20240607)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    p = args.p
    G = product_elliptic(p, args.order)
    params = LocalFieldParams(p)
    tally = Counter()
    print(f"{'u':>16} {'status':>13} {'N':>3} {'bound':>6} {'jet m':>6}")
    for _ in range(args.trials):
        u = [rng.randint(-2 * p, 2 * p) for _ in range(3)]
        if all(c % p == 0 for c in u):
            continue
        try:
            gamma, _ = fgroup.OneParamSubgroup.normalized(G, u)
            m = jetint.jet_order_in_subvariety(fgroup.reduce_jet_mod_p(gamma, min(p - 1, args.order)), [3])
        except ValueError:
            m = None
        rep = fgroup.disk_bound(G, u, [3], params, jet_link=m if u[2] % p else None)
        tally[rep.status] += 1
        print(f"{str(u):>16} {rep.status:>13} {rep.N if rep.N is not None else '-':>3} {str(rep.bound_real or '-'):>6} {m if m is not None else '-':>6}")
    print(dict(tally))


if __name__ == "__main__":
    main()
