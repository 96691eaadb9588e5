"""Relative replication error of the pool value against price, for several grid sizes.

    python scripts/replication_error_curve.py --out results/replication_error.csv
"""

import argparse
import csv
import sys

import numpy as np

from cpmm_hedge.replication import StrikeGrid, build_portfolio, portfolio_payoff


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, default=2000.0)
    ap.add_argument("--m", type=float, default=0.05)
    ap.add_argument("--sizes", default="250,500,1000,2000,4000")
    ap.add_argument("--spacing", default="geometric", choices=("geometric", "uniform"))
    ap.add_argument("--n-eval", type=int, default=400)
    ap.add_argument("--out", default=None, help="CSV path (default stdout)")
    args = ap.parse_args(argv)

    sizes = [int(s) for s in args.sizes.split(",")]
    prices = np.geomspace(args.m / 10, 10 * args.m, args.n_eval)
    target = 2 * np.sqrt(args.k * prices)
    cols = []
    for n in sizes:
        port = build_portfolio(args.k, args.m, StrikeGrid.around(args.m, n, spacing=args.spacing))
        rel = np.abs(portfolio_payoff(port, prices) - target) / target
        cols.append(rel)
        print(f"n={n:<6d} max rel error {rel.max():.3e}", file=sys.stderr)

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["price", *(f"rel_err_n{n}" for n in sizes)])
    for i, p in enumerate(prices):
        w.writerow([f"{p:.10g}", *(f"{c[i]:.6e}" for c in cols)])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
