"""Wall-clock cost of full d-tables on #^n S^1 x S^2 as n and the coefficient bound grow."""
import argparse
import time

from hfd import catalog
from hfd.dinv import d_table
from hfd.functors import all_primitive_subspaces


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--bounds", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    print(f"{'n':>2} {'B':>2} {'subspaces':>9} {'seconds':>8} {'ms/entry':>8}  certified")
    for n in range(args.max_n + 1):
        m = catalog.build_s1s2(n)
        for b in args.bounds:
            count = len(all_primitive_subspaces(n, b))
            t0 = time.perf_counter()
            t = d_table(m, b, jobs=args.jobs)
            dt = time.perf_counter() - t0
            print(f"{n:>2} {b:>2} {count:>9} {dt:>8.2f} {1000 * dt / count:>8.1f}  {t.certified}")


if __name__ == "__main__":
    main()
