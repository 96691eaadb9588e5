"""Randomised soundness sweep: plans that pass the three inequalities never lose on the band.

Draws random positions and bands, builds plans that meet the inequalities
(often with zero slack), and certifies each with the grid oracle.

    python scripts/coverage_sweep.py --trials 5000 --seed 1
"""

import argparse
import math
import sys
import time

import numpy as np

from cpmm_hedge.il_model import PositionParams, il
from cpmm_hedge.strangle import HedgeContext, HedgePlan, budget_ok, min_call_qty, min_put_qty, verify_plan


def draw(rng):
    p0 = rng.uniform(100, 5000)
    c = rng.uniform(1e3, 1e7)
    p_i = p0 * (1 - 0.6 * rng.uniform())
    p_s = p0 * (1 + 0.6 * rng.uniform())
    params = PositionParams(c, p0)
    base = HedgeContext(params, 0.0, p_i, p_s)
    plan = HedgePlan(
        k_c=rng.uniform(p0, p_s), k_p=rng.uniform(p_i, p0),
        q_c=min_call_qty(base) * (1 + rng.choice([0.0, rng.uniform()])),
        q_p=min_put_qty(base) * (1 + rng.choice([0.0, rng.uniform()])),
        d_c=rng.uniform(0, 0.1) * p0, d_p=rng.uniform(0, 0.1) * p0,
    )
    r_p = (plan.cost - min(il(params, plan.k_c), il(params, plan.k_p))) / c
    while not budget_ok(HedgeContext(params, r_p, p_i, p_s), plan).passed:
        r_p = math.nextafter(r_p, math.inf)
    return HedgeContext(params, r_p, p_i, p_s), plan


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-grid", type=int, default=10_000)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    start = time.perf_counter()
    worst, failures = math.inf, 0
    for _ in range(args.trials):
        ctx, plan = draw(rng)
        rep = verify_plan(ctx, plan, n_grid=args.n_grid)
        worst = min(worst, rep.oracle_min / ctx.c)
        failures += not rep.certified
    print(f"trials={args.trials} failures={failures} worst min/c={worst:.3e} "
          f"elapsed={time.perf_counter() - start:.2f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
