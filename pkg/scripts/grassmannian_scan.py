"""Scan d and d* over rank-1 subspaces of S_1 # (k copies of 0-surgery on the trefoil).

Prints how many lines realise each (d, d*) pair, which shows how the value
depends on the S^1 x S^2 coordinate alone.
"""
import argparse
from collections import Counter

from hfd import catalog
from hfd.dinv import d_bot, d_table, d_top
from hfd.functors import rank1
from hfd.hfmodel import connected_sum


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--copies", type=int, default=2)
    ap.add_argument("--bound", type=int, default=2)
    args = ap.parse_args()
    m = catalog.build_s1s2(1)
    for _ in range(args.copies):
        m = connected_sum(m, catalog.build_trefoil_surgery())
    print(f"{m.name}: b1 = {m.n}, d_bot = {d_bot(m)}, d_top = {d_top(m)}")
    t = d_table(m, args.bound, subspaces=rank1(m.n, args.bound))
    by_alpha = Counter()
    for e in t.entries:
        alpha = e.subspace.basis[0][0] != 0
        by_alpha[(alpha, e.d.value, e.d_star.value)] += 1
    for (alpha, d, ds), count in sorted(by_alpha.items()):
        print(f"  alpha-coefficient {'nonzero' if alpha else 'zero':>7}: d = {d}, d* = {ds}  ({count} lines)")
    print("all certified:", t.certified)


if __name__ == "__main__":
    main()
