"""Command-line entry point.

Exit codes: 0 success or certified, 1 I/O or data error, 2 usage error,
3 uncertified plan or infeasible search.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import replication as rep
from .chain_io import format_number, load_chain, parse_expiry
from .config import ConfigError, load_config
from .errors import DataError, DomainError, InfeasibleError
from .il_model import PositionParams, il_curve
from .oracle import certify_nonnegative
from .strangle import (
    HedgeContext,
    HedgePlan,
    check_admissible,
    combined_payoff,
    coverage_grid,
    optimize_plan,
    payoff_curve,
    verify_plan,
)

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_UNCERTIFIED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _band(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError(f"need 0 < lo < hi, got {text!r}")
    return lo, hi


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return v


def _count(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _write_csv(path: str | None, header, rows) -> None:
    fh = sys.stdout if path in (None, "-") else open(path, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else format_number(float(v)) for v in row])
    finally:
        if fh is not sys.stdout:
            fh.close()


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


# --- replicate -------------------------------------------------------------

def cmd_replicate(args, cfg) -> int:
    n = args.grid_n or cfg.grid_n
    spacing = args.spacing or cfg.spacing
    k_min = args.k_min or args.m / cfg.k_min_factor
    k_max = args.k_max or args.m * cfg.k_max_factor
    try:
        grid = rep.StrikeGrid(k_min, k_max, n, spacing)
        port = rep.build_portfolio(args.k, args.m, grid, anchor_options=args.anchor_options)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    lo, hi = args.eval_band or (args.m / 10, args.m * 10)
    prices = np.geomspace(lo, hi, max(args.eval_n or cfg.eval_n, 2))
    prices[0], prices[-1] = lo, hi
    report = rep.error_report(port, lambda p: 2.0 * np.sqrt(args.k * p), prices)

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_csv(os.path.join(args.out, "legs.csv"), ("side", "strike", "weight"), port.legs())
        _write_csv(os.path.join(args.out, "error_curve.csv"), ("price", "target", "replicated", "rel_error"), report.rows())

    summary = {
        "bond_notional": port.bond_notional,
        "futures_notional": port.futures_notional,
        "anchor": port.anchor,
        "n_legs": len(port.legs()),
        "k_min": grid.k_min,
        "k_max": grid.k_max,
        "max_rel_error": report.max_rel_error,
        "out_of_band": len(report.out_of_band),
        "put_tail_shortfall": port.put_tail_shortfall,
        "call_tail_slope": port.call_tail_slope,
    }
    if args.json:
        _emit_json(summary)
    else:
        print(f"bond notional     {format_number(port.bond_notional)}")
        print(f"futures notional  {format_number(port.futures_notional)}")
        print(f"option legs       {summary['n_legs']} on [{grid.k_min:g}, {grid.k_max:g}] ({spacing})")
        print(f"max rel error     {report.max_rel_error:.3e} on [{lo:g}, {hi:g}]")
        if report.out_of_band:
            print(f"out of band       {len(report.out_of_band)} evaluation prices outside the strike range")
        print(f"tail diagnostics  put shortfall at P->0 {port.put_tail_shortfall:.6g}, "
              f"call slope lost above k_max {port.call_tail_slope:.6g}")
    return EXIT_OK


# --- il --------------------------------------------------------------------

def cmd_il(args, cfg) -> int:
    lo, hi = args.band
    n = args.n or cfg.il_n
    params = PositionParams(args.c, args.p0)
    rows = il_curve(params, lo, hi, n, args.spacing or cfg.spacing)
    _write_csv(args.out, ("price", "il", "v_pool", "v_hold"), rows)
    return EXIT_OK


# --- hedge -----------------------------------------------------------------

def _context(args) -> HedgeContext:
    try:
        return HedgeContext(PositionParams(args.c, args.p0), args.r_p, args.p_i, args.p_s)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _plan(args) -> HedgePlan:
    try:
        return HedgePlan(args.k_c, args.k_p, args.q_c, args.q_p, args.d_c, args.d_p)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _write_curve(path, ctx, plan, n):
    if path:
        prices = coverage_grid(ctx, plan, n).points()
        _write_csv(path, ("price", "il", "strangle", "combined"), payoff_curve(ctx, plan, prices))


def cmd_hedge_verify(args, cfg) -> int:
    ctx, plan = _context(args), _plan(args)
    try:
        report = verify_plan(ctx, plan, n_grid=args.oracle_n or cfg.oracle_n, eps_rel=cfg.cert_eps_rel)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    _write_curve(args.out, ctx, plan, args.oracle_n or cfg.oracle_n)
    if args.json:
        _emit_json(report.to_dict())
    else:
        print(f"hedge plan k_p={plan.k_p:g} q_p={plan.q_p:.8g} k_c={plan.k_c:g} q_c={plan.q_c:.8g} D={plan.cost:.8g}")
        print(report.format())
    return EXIT_OK if report.certified else EXIT_UNCERTIFIED


def cmd_hedge_optimize(args, cfg) -> int:
    ctx = _context(args)
    try:
        chain = load_chain(args.chain)
    except OSError as exc:
        print(f"error: cannot read chain: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        expiry = parse_expiry(args.expiry) if args.expiry else None
    except ValueError:
        raise UsageError(f"bad expiry date {args.expiry!r}") from None
    try:
        plan = optimize_plan(ctx, chain, expiry)
    except InfeasibleError as exc:
        if args.json:
            _emit_json({"status": "infeasible", "message": str(exc), "min_violation": exc.min_violation})
        else:
            print(f"infeasible: {exc}")
        return EXIT_UNCERTIFIED
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    report = verify_plan(ctx, plan, n_grid=args.oracle_n or cfg.oracle_n, eps_rel=cfg.cert_eps_rel)
    _write_curve(args.out, ctx, plan, args.oracle_n or cfg.oracle_n)
    if args.json:
        _emit_json({"status": report.status, "plan": plan.to_dict(), "report": report.to_dict()})
    else:
        print(f"put   k_p={plan.k_p:g}  q_p={plan.q_p:.8g}  premium {plan.d_p:.8g}")
        print(f"call  k_c={plan.k_c:g}  q_c={plan.q_c:.8g}  premium {plan.d_c:.8g}")
        print(f"cost  D={plan.cost:.8g}  budget r_p*c={ctx.pool_income:.8g}")
        print(report.format())
    return EXIT_OK if report.certified else EXIT_UNCERTIFIED


def cmd_certify(args, cfg) -> int:
    """Grid-certify the combined payoff directly, whether or not the inequalities hold."""
    ctx, plan = _context(args), _plan(args)
    try:
        check_admissible(ctx, plan)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    n = args.oracle_n or cfg.oracle_n
    eps = (args.eps_rel if args.eps_rel is not None else cfg.cert_eps_rel) * ctx.c
    verdict = certify_nonnegative(lambda p: combined_payoff(ctx, plan, p), coverage_grid(ctx, plan, n), eps)
    _write_curve(args.out, ctx, plan, n)
    if args.json:
        _emit_json({"passed": verdict.passed, "min_value": verdict.min_value, "argmin": verdict.argmin,
                    "eps": verdict.eps, "n_points": verdict.n_points})
    else:
        word = "non-negative" if verdict.passed else "NEGATIVE"
        print(f"{word} on [{ctx.p_i:g}, {ctx.p_s:g}]: min {verdict.min_value:.8g} at price "
              f"{verdict.argmin:.8g} ({verdict.n_points} points, eps {eps:.3g})")
    return EXIT_OK if verdict.passed else EXIT_UNCERTIFIED


# --- parser ----------------------------------------------------------------

def _globals(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--config", default=d(None), help="flat key = value config file")
    p.add_argument("--out", default=d(None), help="output path (replicate: directory)")
    p.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")
    return p


def _ctx_flags(p):
    p.add_argument("--c", type=_positive, required=True, help="initial capital (quote ccy)")
    p.add_argument("--p0", type=_positive, required=True, help="entry price")
    p.add_argument("--r-p", type=_nonneg, required=True, help="pool return over the horizon (fraction)")
    p.add_argument("--p-i", type=_positive, required=True, help="lower end of the coverage band")
    p.add_argument("--p-s", type=_positive, required=True, help="upper end of the coverage band")
    p.add_argument("--oracle-n", type=_count, help="oracle grid size")


def _plan_flags(p):
    for flag, what in (("--k-c", "call strike"), ("--k-p", "put strike")):
        p.add_argument(flag, type=_positive, required=True, help=what)
    for flag, what in (("--q-c", "call quantity"), ("--q-p", "put quantity"),
                       ("--d-c", "call premium per unit"), ("--d-p", "put premium per unit")):
        p.add_argument(flag, type=_nonneg, required=True, help=what)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpmm-hedge", parents=[_globals(False)],
                                     description="CPMM pool replication and impermanent-loss hedging")
    sub = parser.add_subparsers(dest="command", required=True)
    g = _globals(True)

    p = sub.add_parser("replicate", parents=[g], help="bond/futures/options replication of 2*sqrt(k*P)")
    p.add_argument("--k", type=_positive, required=True, help="pool invariant x*y")
    p.add_argument("--m", type=_positive, required=True, help="anchor (entry) price")
    p.add_argument("--grid-n", type=_count, help="strikes per side")
    p.add_argument("--spacing", choices=("uniform", "geometric"))
    p.add_argument("--k-min", type=_positive)
    p.add_argument("--k-max", type=_positive)
    p.add_argument("--eval-band", type=_band, help="lo:hi for the error curve")
    p.add_argument("--eval-n", type=_count)
    p.add_argument("--anchor-options", action="store_true", help="write the futures leg as call-minus-put at m")
    p.set_defaults(func=cmd_replicate)

    p = sub.add_parser("il", parents=[g], help="impermanent-loss curve CSV")
    p.add_argument("--c", type=_positive, required=True)
    p.add_argument("--p0", type=_positive, required=True)
    p.add_argument("--band", type=_band, required=True, help="lo:hi")
    p.add_argument("--n", type=_count)
    p.add_argument("--spacing", choices=("uniform", "geometric"))
    p.set_defaults(func=cmd_il)

    hedge = sub.add_parser("hedge", parents=[g], help="long-strangle hedges").add_subparsers(dest="action", required=True)
    p = hedge.add_parser("verify", parents=[g], help="check a plan against the coverage inequalities")
    _ctx_flags(p)
    _plan_flags(p)
    p.set_defaults(func=cmd_hedge_verify)
    p = hedge.add_parser("optimize", parents=[g], help="cheapest certified strangle from a chain")
    _ctx_flags(p)
    p.add_argument("--chain", required=True, help="chain file (.csv or .json)")
    p.add_argument("--expiry", help="expiry date when the chain holds several")
    p.set_defaults(func=cmd_hedge_optimize)

    p = sub.add_parser("certify", parents=[g], help="grid-check the combined payoff of a plan")
    _ctx_flags(p)
    _plan_flags(p)
    p.add_argument("--eps-rel", type=_nonneg, help="tolerance as a fraction of capital")
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
