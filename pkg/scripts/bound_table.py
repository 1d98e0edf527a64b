"""Tables of the closed-form bounds.

1. Symmetric squares of genus-g curves: c1^2, the threshold (8g - 10)^g and the least
   admissible prime.
2. Genus three above 521: the exact bound, its floor, and the 7.1 p simplification.
3. The disk term ((p-1)/(p-2))(p + 4 sqrt p + 3) against 4p for small primes.
"""

import argparse

from sympy import nextprime, primerange

from chabsurf import bounds


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gmax", type=int, default=8)
    ap.add_argument("--count", type=int, default=1000, help="#C'(F_p) fed to the genus-3 bound")
    args = ap.parse_args()

    print("genus  c1^2  (8g-10)^g            least prime")
    for g in range(3, args.gmax + 1):
        inv = bounds.sym2_invariants(g)
        print(f"{g:>5} {inv.c1sq:>5}  {inv.threshold:<20} {nextprime(inv.threshold)}")

    print("\ngenus 3, #C'(F_p) =", args.count)
    print("    p  bound (exact)                                floor  7.1p + count")
    for p in [521, 523, 541, 1009, 10007]:
        rep = bounds.genus3_bound(p, args.count)
        print(f"{p:>5}  {str(rep.bound_real):<44} {rep.bound_int:>5}  {float(rep.extra['simplified']):.1f}")

    print("\n    p  disk term (float)   4p   dominated")
    for p in primerange(5, 60):
        term = bounds.disk_term(p, 1, 1, 1)
        print(f"{p:>5}  {float(term.a) + float(term.b) * term.d ** 0.5:>16.3f} {4 * p:>5}   {bounds.four_p_dominates(p)}")


if __name__ == "__main__":
    main()
