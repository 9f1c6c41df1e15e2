#!/usr/bin/env python3
"""Print the exact tail values C, D and the crossing thresholds near 0.01."""
import argparse
import time

from hyperbound.combinatorics import binomial_tail, render, threshold_crossing


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[1000, 10_000, 100_000])
    ap.add_argument("--gamma", default="0.01")
    ap.add_argument("--digits", type=int, default=9)
    args = ap.parse_args()
    for n in args.n:
        for kind in ("C", "D"):
            t0 = time.perf_counter()
            t = threshold_crossing(kind, n, args.gamma).nearest
            value = binomial_tail(kind, n, t)
            print(f"{kind}({t}, {n}) = {render(value, args.digits, rounding='down')}"
                  f"  [{time.perf_counter() - t0:.1f} s]")


if __name__ == "__main__":
    main()
