"""Sweep the two-form example ds1 + s1^2 ds2, ds1 + s2^2 ds2 over primes.

For each prime prints the largest order of a jet at the origin integral for both forms,
the witness found by the search, the overdetermined bound from the branches of
s2^2 - s1^2 = 0, and the number of search nodes.
"""

import argparse
import time

from chabsurf import jetint
from chabsurf.presets import sharp_forms
from chabsurf.rings import is_prime


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pmax", type=int, default=31)
    ap.add_argument("--ext", type=int, default=1, choices=[1, 2])
    args = ap.parse_args()
    pre = sharp_forms()
    print(f"{'p':>4} {'m':>3} {'bound':>5} {'nodes':>7} {'time':>7}  witness")
    for p in range(5, args.pmax + 1):
        if not is_prime(p):
            continue
        t0 = time.perf_counter()
        res = jetint.max_jet_order(pre.omega1, pre.omega2, p, ext=args.ext)
        b = jetint.overdetermined_bound(pre.branch_records(p))
        dt = time.perf_counter() - t0
        wit = res.witness.as_text() if res.witness is not None else "-"
        print(f"{p:>4} {res.m:>3} {b:>5} {res.nodes:>7} {dt:>6.2f}s  {wit}")


if __name__ == "__main__":
    main()
