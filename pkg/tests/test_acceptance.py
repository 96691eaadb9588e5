"""Exit criteria for the package, one test per criterion.

Run alone with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per
criterion is printed in the terminal summary.
"""

import contextlib
import io
import json
import math
import time
from dataclasses import replace
from datetime import date

import mpmath as mp
import numpy as np
import pytest

from cpmm_hedge.chain_io import OptionQuote, chain_from_quotes, load_chain, parse_chain, serialize_chain
from cpmm_hedge.cli import main
from cpmm_hedge.il_model import PositionParams, il, il_derivative
from cpmm_hedge.oracle import GridSpec, certify_nonnegative
from cpmm_hedge.replication import StrikeGrid, build_portfolio, decompose, error_report, option_density, replication_error
from cpmm_hedge.strangle import (
    CertificationReport,
    HedgeContext,
    HedgePlan,
    budget_ok,
    combined_payoff,
    min_call_qty,
    min_put_qty,
    optimize_plan,
    verify_plan,
)
from oracles import enumerate_cheapest

K, M = 2000.0, 0.05
C, P0 = 170_000.0, 1700.0


def run_cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def test_criterion_1_table_example_notionals():
    start = time.perf_counter()
    code, out = run_cli(["replicate", "--k", "2000", "--m", "0.05"])
    elapsed = time.perf_counter() - start
    assert code == 0
    values = dict(line.rsplit(None, 1) for line in out.splitlines()[:2])
    assert float(values["bond notional"]) == 20.0
    assert float(values["futures notional"]) == 200.0
    expected = -0.5 * math.sqrt(2000 / 0.1**3)
    assert abs(option_density(2000, 0.1) - expected) <= 1e-12 * abs(expected)
    assert elapsed < 0.1


def test_criterion_2_replication_convergence():
    start = time.perf_counter()
    band = (M / 10, 10 * M)
    err = {n: replication_error(K, M, StrikeGrid(M / 50, 50 * M, n, "geometric"), band, 2000).max_rel_error
           for n in (1000, 2000, 4000)}
    elapsed = time.perf_counter() - start
    assert err[2000] <= 0.005
    # geometric edges for 2n cells contain those for n cells
    assert err[4000] < err[2000] < err[1000]
    assert elapsed < 1.0


@pytest.mark.parametrize("name,f,df,d2f", [
    ("quadratic", lambda p: p**2, lambda p: 2 * p, lambda k: np.full_like(k, 2.0)),
    ("bounded 1-exp(-P/m)", lambda p: 1 - np.exp(-p / M), lambda p: np.exp(-p / M) / M,
     lambda k: -np.exp(-k / M) / M**2),
])
def test_criterion_3_generic_decomposition(name, f, df, d2f):
    port = decompose(f, df, d2f, M, StrikeGrid(M / 50, 50 * M, 2000, "geometric"))
    rep = error_report(port, f, np.geomspace(M / 10, 10 * M, 2000))
    assert rep.max_rel_error <= 0.005


def test_criterion_4_impermanent_loss_suite():
    mp.mp.dps = 50
    params = PositionParams(C, P0)
    assert il(params, 1700.0) == 0.0

    grid = np.geomspace(1.7, 1.7e6, 10_000)
    values = il(params, grid)
    assert np.all(values <= 0)
    for p, v in zip(grid.tolist(), values.tolist()):
        r = mp.mpf(p) / P0
        squared = -(C / 2) * (mp.sqrt(r) - 1) ** 2
        closed = C * (mp.sqrt(r) - (r + 1) / 2)
        assert abs(closed - squared) <= mp.mpf("1e-40") * C
        assert abs(v - squared) <= 1e-12 * abs(squared)

    f = lambda q: C * (mp.sqrt(q / P0) - (q / P0 + 1) / 2)
    for p in np.geomspace(85, 34_000, 1000).tolist():
        q, h = mp.mpf(p), mp.mpf(p) * mp.mpf("1e-4")
        fd = (f(q + h) - f(q - h)) / (2 * h)
        assert abs(il_derivative(params, p) - fd) <= 1e-6 * abs(fd)


def _random_certified(rng):
    p0 = rng.uniform(100, 5000)
    c = rng.uniform(1e3, 1e7)
    p_i = p0 * (1 - 0.6 * rng.uniform())
    p_s = p0 * (1 + 0.6 * rng.uniform())
    k_p, k_c = rng.uniform(p_i, p0), rng.uniform(p0, p_s)
    params = PositionParams(c, p0)
    base = HedgeContext(params, 0.0, p_i, p_s)
    q_p = min_put_qty(base) * (1 + rng.choice([0.0, rng.uniform(0, 1)]))
    q_c = min_call_qty(base) * (1 + rng.choice([0.0, rng.uniform(0, 1)]))
    plan = HedgePlan(k_c, k_p, q_c, q_p, rng.uniform(0, 0.1) * p0, rng.uniform(0, 0.1) * p0)
    r_p = (plan.cost - min(il(params, k_c), il(params, k_p))) / c
    while not budget_ok(HedgeContext(params, r_p, p_i, p_s), plan).passed:
        r_p = math.nextafter(r_p, math.inf)
    return HedgeContext(params, r_p, p_i, p_s), plan


def test_criterion_5_coverage_soundness():
    start = time.perf_counter()
    rng = np.random.default_rng(20240228)
    failures = []
    for _ in range(1000):
        ctx, plan = _random_certified(rng)
        report = verify_plan(ctx, plan, n_grid=10_000)
        assert report.inequalities_hold
        spec = GridSpec(ctx.p_i, ctx.p_s, 10_000, breakpoints=(plan.k_p, plan.k_c))
        verdict = certify_nonnegative(lambda p: combined_payoff(ctx, plan, p), spec, 1e-9 * ctx.c)
        if not verdict.passed:
            failures.append((ctx, plan, verdict))
    assert failures == []
    assert time.perf_counter() - start < 30


def test_criterion_6_budget_threshold():
    d_p, d_c = math.sqrt(2 * 1000 / C), math.sqrt(2 * 500 / C)
    plan = HedgePlan(k_c=P0 * (1 + d_c) ** 2, k_p=P0 * (1 - d_p) ** 2, q_c=1, q_p=1, d_c=1000, d_p=2000)
    params = PositionParams(C, P0)
    ctx = lambda income: HedgeContext(params, income / C, 1000, 2600)
    ok = budget_ok(ctx(4250), plan)
    assert ok.passed and abs(ok.slack - 250) <= 1e-9
    assert not budget_ok(ctx(3900), plan).passed
    # exactly at lhs = rhs the inequality holds; one ulp below it fails
    lhs = ok.lhs
    at = HedgeContext(params, 0.0, 1000, 2600)
    assert budget_ok(replace(at, r_p=lhs / C), plan).lhs == lhs
    r_tight = lhs / C
    while r_tight * C < lhs:
        r_tight = math.nextafter(r_tight, math.inf)
    while math.nextafter(r_tight, 0) * C >= lhs:
        r_tight = math.nextafter(r_tight, 0)
    assert budget_ok(replace(at, r_p=r_tight), plan).passed
    assert not budget_ok(replace(at, r_p=math.nextafter(r_tight, 0)), plan).passed


def test_criterion_7_optimizer_matches_enumeration():
    rng = np.random.default_rng(7)
    ctx = HedgeContext(PositionParams(C, P0), 0.008, 1250, 2250)
    put_k = np.linspace(1250, 1700, 20)
    call_k = np.linspace(1700, 2250, 20)
    # premiums rise towards the money with noise, as on a real chain
    puts = [(float(k), float(60 * math.exp(-(P0 - k) / 200) * rng.uniform(0.8, 1.2))) for k in put_k]
    calls = [(float(k), float(60 * math.exp(-(k - P0) / 250) * rng.uniform(0.8, 1.2))) for k in call_k]
    quotes = [OptionQuote("put", k, date(2024, 3, 29), mark=d) for k, d in puts]
    quotes += [OptionQuote("call", k, date(2024, 3, 29), mark=d) for k, d in calls]
    chain = chain_from_quotes(quotes, P0)
    assert len(chain.quotes) == 40

    best = enumerate_cheapest(C, P0, ctx.r_p, ctx.p_i, ctx.p_s, min_call_qty(ctx), min_put_qty(ctx), puts, calls)
    assert best is not None
    plan = optimize_plan(ctx, chain)
    assert plan.cost == best[0] and (plan.k_p, plan.k_c) == best[1:]
    report = verify_plan(ctx, plan)
    assert report.oracle_ran and report.certified


def test_criterion_8_chain_round_trip():
    rng = np.random.default_rng(8)
    quotes = []
    for i, k in enumerate(np.arange(1000, 2250, 50)):
        for kind in ("put", "call"):
            # 15 significant digits
            bid = float(f"{rng.uniform(1, 90):.13f}")
            ask = float(f"{bid + rng.uniform(0, 5):.13f}")
            mark = None if i % 7 == 0 else float(f"{(bid + ask) / 2:.13f}")
            quotes.append(OptionQuote(kind, float(k), date(2024, 3, 29), bid, ask, mark))
    chain = chain_from_quotes(quotes, 1700.0)
    assert len(chain.quotes) == 50
    for fmt in ("csv", "json"):
        text = serialize_chain(chain, fmt)
        again = parse_chain(text, fmt)
        assert again == chain
        assert serialize_chain(again, fmt) == text
    converted = OptionQuote("put", 1500, date(2024, 3, 29), mark=0.05, premium_ccy="base").in_quote_ccy(1700)
    assert converted.mark == 85


def test_criterion_9_cli_contract(tmp_path, chain_path):
    ctx_flags = ["--c", "170000", "--p0", "1700", "--r-p", "0.008", "--p-i", "1300", "--p-s", "2200"]
    hctx = HedgeContext(PositionParams(C, P0), 0.008, 1300, 2200)
    plan_flags = ["--k-p", "1350", "--k-c", "2100", "--q-p", repr(min_put_qty(hctx)),
                  "--q-c", repr(min_call_qty(hctx)), "--d-p", "14.62", "--d-c", "22.525"]

    code, out = run_cli(["hedge", "verify", "--json", *ctx_flags, *plan_flags])
    assert code == 0
    obj = json.loads(out)
    report = CertificationReport.from_dict(obj)
    assert report.certified and report.to_dict() == obj

    code, out = run_cli(["hedge", "optimize", "--json", *ctx_flags, "--chain", str(chain_path)])
    assert code == 0
    obj = json.loads(out)
    plan = HedgePlan.from_dict(obj["plan"])
    assert verify_plan(hctx, plan).certified
    assert CertificationReport.from_dict(obj["report"]).to_dict() == obj["report"]

    chain = load_chain(str(chain_path))
    scale = lambda v: None if v is None else v * 100
    dear = replace(chain, quotes=tuple(replace(q, bid=scale(q.bid), ask=scale(q.ask), mark=scale(q.mark))
                                       for q in chain.quotes))
    path = tmp_path / "dear.csv"
    path.write_text(serialize_chain(dear))
    code, out = run_cli(["hedge", "optimize", *ctx_flags, "--chain", str(path)])
    assert code == 3 and "infeasible" in out and "smallest overshoot" in out
