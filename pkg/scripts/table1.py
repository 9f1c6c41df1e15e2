#!/usr/bin/env python3
"""Budgets and robustness for an initial risk of 1%, in exact, all-n and limit form."""
import argparse
from fractions import Fraction

from hyperbound.isoperimetry import BoundKind, QUANTITIES, table1_generate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[1000, 10_000])
    ap.add_argument("--mu", default="0.01")
    args = ap.parse_args()
    for rep in table1_generate(args.n, Fraction(args.mu)):
        print(f"n = {rep.n}  (ball index k = {rep.ball_index.k})")
        for q in QUANTITIES:
            cells = []
            for kind in BoundKind:
                e = rep.get(q, kind)
                if kind is BoundKind.ASYMPTOTIC:
                    cells.append(f"limit: {e.coefficient(rep.n):.4f} sqrt(n)")
                else:
                    cells.append(f"{kind.value}: {float(e.value):8.2f} = {e.coefficient(rep.n):.4f} sqrt(n)")
            print(f"  {q:<13} " + " | ".join(cells))


if __name__ == "__main__":
    main()
