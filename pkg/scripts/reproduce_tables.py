"""Print the d / d* tables of the catalog models and of the connected sums that should reproduce them."""
import argparse

from hfd import catalog
from hfd.dinv import d_bot, d_table, d_top
from hfd.hfmodel import connected_sum, with_name


def show(m, bound):
    t = d_table(m, bound)
    print(f"{m.name}  b1={m.n}  d_bot={d_bot(m)}  d_top={d_top(m)}  certified={t.certified}")
    for e in t.entries:
        print(f"  {str(e.subspace):>14}  rank {e.subspace.rank}  d={e.d}  d*={e.d_star}")
    return t.values()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bound", type=int, default=2)
    ap.add_argument("--max-n", type=int, default=3)
    args = ap.parse_args()
    for n in range(args.max_n + 1):
        show(catalog.build_s1s2(n), args.bound)
    show(catalog.build_trefoil_surgery(), args.bound)
    hyp = show(catalog.build_example_hyp(), args.bound)
    s1 = catalog.build_s1s2(1)
    print()
    summed = show(with_name(connected_sum(s1, catalog.build_trefoil_surgery()), "s1s2-1 # trefoil0"), args.bound)
    print("connected sum matches example-hyp:", summed == hyp)
    two = show(with_name(connected_sum(s1, s1), "s1s2-1 # s1s2-1"), args.bound)
    print("S_1 # S_1 matches S_2:", two == d_table(catalog.build_s1s2(2), args.bound).values())


if __name__ == "__main__":
    main()
