"""Impermanent loss across a price band, in quote currency and as a fraction of holding value.

    python scripts/il_profile.py --c 170000 --p0 1700 --out results/il.csv
"""

import argparse
import csv
import sys

import numpy as np

from cpmm_hedge.il_model import PositionParams, il_curve


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c", type=float, default=170_000.0)
    ap.add_argument("--p0", type=float, default=1700.0)
    ap.add_argument("--lo", type=float, default=0.25, help="band low as a multiple of p0")
    ap.add_argument("--hi", type=float, default=4.0, help="band high as a multiple of p0")
    ap.add_argument("--n", type=int, default=301)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    params = PositionParams(args.c, args.p0)
    rows = il_curve(params, args.lo * args.p0, args.hi * args.p0, args.n, "geometric")
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["price", "il", "v_pool", "v_hold", "il_frac"])
    for p, loss, vp, vh in rows:
        w.writerow([f"{p:.10g}", f"{loss:.10g}", f"{vp:.10g}", f"{vh:.10g}", f"{loss / vh:.6e}"])
    if args.out:
        fh.close()
    worst = min(rows[0][1] / rows[0][3], rows[-1][1] / rows[-1][3])
    print(f"worst IL at band edges: {worst:.4%} of holding value", file=sys.stderr)


if __name__ == "__main__":
    main()
