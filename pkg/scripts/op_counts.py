"""Measured multiply/add counts per phase next to the published reference.

    python scripts/op_counts.py --m 10 35 70 --n 10
"""

import argparse

from csqi.evaluation import PHASES, count_ops, reference_counts


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, nargs="+", default=[35, 70])
    ap.add_argument("--n", type=int, default=10)
    args = ap.parse_args()

    print(f"{'phase':18}{'M':>5}{'mults':>10}{'adds':>10}{'ref mults':>11}{'ref adds':>10}{'ratio':>8}")
    for m in args.m:
        for phase in PHASES:
            oc = count_ops(phase, m, args.n)
            rm, ra = reference_counts(phase, m, args.n)
            print(f"{phase:18}{m:5d}{oc.multiplies:10d}{oc.additions:10d}{rm:11d}{ra:10d}{oc.multiplies / rm:8.3f}")


if __name__ == "__main__":
    main()
