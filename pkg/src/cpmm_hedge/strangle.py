"""Long-strangle hedges of impermanent loss with a guaranteed coverage band.

An LP with capital ``c`` entered at ``p0`` earns ``r_p * c`` from the pool by
expiry and suffers ``il(P_T)``. Buying ``q_p`` puts at ``k_p`` and ``q_c``
calls at ``k_c`` for a total premium ``D`` makes the combined payoff
non-negative on ``[p_i, p_s]`` as soon as

    q_p >= (c/2) (1/sqrt(p_i p0) - 1/p0)
    D - min(il(k_c), il(k_p)) <= r_p c
    q_c >= -(c/2) (1/sqrt(p_s p0) - 1/p0)

provided ``p_i <= k_p <= p0 <= k_c <= p_s``. The conditions are sufficient,
not necessary, so a plan failing them is reported as uncertified rather than
unsafe; the grid oracle is the final word on the sampled band.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from datetime import date

import numpy as np

from . import il_model
from .chain_io import OptionChain, filter_quotes, mid_price
from .errors import DomainError, InfeasibleError
from .il_model import PositionParams
from .oracle import DEFAULT_N, GridSpec, certify_nonnegative

# certification tolerance relative to capital
CERT_EPS_REL = 1e-9


@dataclass(frozen=True)
class HedgeContext:
    params: PositionParams
    r_p: float
    p_i: float
    p_s: float

    def __post_init__(self):
        for name in ("r_p", "p_i", "p_s"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.r_p >= 0:
            raise DomainError(f"r_p must be >= 0, got {self.r_p!r}")
        if not (0 < self.p_i <= self.params.p0 <= self.p_s < math.inf):
            raise DomainError(
                f"coverage band [{self.p_i!r}, {self.p_s!r}] must contain p0={self.params.p0!r}"
            )

    @property
    def c(self) -> float:
        return self.params.c

    @property
    def p0(self) -> float:
        return self.params.p0

    @property
    def pool_income(self) -> float:
        return self.r_p * self.params.c


@dataclass(frozen=True)
class HedgePlan:
    k_c: float
    k_p: float
    q_c: float
    q_p: float
    d_c: float
    d_p: float

    def __post_init__(self):
        for name in ("k_c", "k_p", "q_c", "q_p", "d_c", "d_p"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.k_p > 0 and self.k_c > 0 and self.k_p <= self.k_c):
            raise DomainError(f"need 0 < k_p <= k_c, got k_p={self.k_p!r}, k_c={self.k_c!r}")
        for name in ("q_c", "q_p", "d_c", "d_p"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be non-negative, got {v!r}")

    @property
    def cost(self) -> float:
        return self.q_c * self.d_c + self.q_p * self.d_p

    def to_dict(self) -> dict:
        return {**asdict(self), "cost": self.cost}

    @classmethod
    def from_dict(cls, d: dict) -> HedgePlan:
        return cls(**{k: float(d[k]) for k in ("k_c", "k_p", "q_c", "q_p", "d_c", "d_p")})


@dataclass(frozen=True)
class InequalityCheck:
    passed: bool
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class CertificationReport:
    ineq_put: InequalityCheck
    ineq_budget: InequalityCheck
    ineq_call: InequalityCheck
    oracle_min: float | None = None
    oracle_argmin: float | None = None
    n_grid: int | None = None
    eps: float | None = None

    @property
    def inequalities_hold(self) -> bool:
        return self.ineq_put.passed and self.ineq_budget.passed and self.ineq_call.passed

    @property
    def oracle_ran(self) -> bool:
        return self.oracle_min is not None

    @property
    def certified(self) -> bool:
        return self.inequalities_hold and self.oracle_ran and self.oracle_min >= -self.eps

    @property
    def status(self) -> str:
        return "certified" if self.certified else "uncertified"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status
        return d

    @classmethod
    def from_dict(cls, d: dict) -> CertificationReport:
        checks = {k: InequalityCheck(**d[k]) for k in ("ineq_put", "ineq_budget", "ineq_call")}
        return cls(**checks, **{k: d.get(k) for k in ("oracle_min", "oracle_argmin", "n_grid", "eps")})

    def format(self) -> str:
        lines = []
        for label, chk in (("put quantity", self.ineq_put), ("budget", self.ineq_budget), ("call quantity", self.ineq_call)):
            mark = "pass" if chk.passed else "FAIL"
            lines.append(f"  {label:<14} {mark:<5} lhs={chk.lhs:<14.8g} rhs={chk.rhs:<14.8g} slack={chk.slack:.8g}")
        if self.oracle_ran:
            lines.append(f"  oracle         min={self.oracle_min:.8g} at price {self.oracle_argmin:.8g} "
                         f"(n={self.n_grid}, eps={self.eps:.3g})")
        else:
            lines.append("  oracle         not run")
        lines.append(f"  status         {self.status}")
        return "\n".join(lines)


def strangle_payoff(plan: HedgePlan, p_t):
    """Net strangle payoff at expiry, premium ``D`` included."""
    p = np.asarray(p_t, dtype=float)
    out = plan.q_c * np.maximum(p - plan.k_c, 0.0) + plan.q_p * np.maximum(plan.k_p - p, 0.0) - plan.cost
    return float(out) if np.ndim(p_t) == 0 else out


def combined_payoff(ctx: HedgeContext, plan: HedgePlan, p_t):
    """Pool income plus strangle plus impermanent loss; ``D`` is charged once."""
    return ctx.pool_income + strangle_payoff(plan, p_t) + il_model.il(ctx.params, p_t)


def min_put_qty(ctx: HedgeContext) -> float:
    return max(ctx.c / 2 * (1 / math.sqrt(ctx.p_i * ctx.p0) - 1 / ctx.p0), 0.0)


def min_call_qty(ctx: HedgeContext) -> float:
    return max(-ctx.c / 2 * (1 / math.sqrt(ctx.p_s * ctx.p0) - 1 / ctx.p0), 0.0)


def budget_ok(ctx: HedgeContext, plan: HedgePlan) -> InequalityCheck:
    """``D - min(il(k_c), il(k_p)) <= r_p * c``; slack is ``rhs - lhs``."""
    worst = min(il_model.il(ctx.params, plan.k_c), il_model.il(ctx.params, plan.k_p))
    lhs = plan.cost - worst
    rhs = ctx.pool_income
    return InequalityCheck(lhs <= rhs, lhs, rhs)


def check_admissible(ctx: HedgeContext, plan: HedgePlan) -> None:
    if not (ctx.p_i <= plan.k_p <= ctx.p0 <= plan.k_c <= ctx.p_s):
        raise DomainError(
            f"strikes must satisfy p_i <= k_p <= p0 <= k_c <= p_s; got "
            f"{ctx.p_i!r} <= {plan.k_p!r} <= {ctx.p0!r} <= {plan.k_c!r} <= {ctx.p_s!r}"
        )


def coverage_grid(ctx: HedgeContext, plan: HedgePlan, n: int = DEFAULT_N) -> GridSpec:
    return GridSpec(ctx.p_i, ctx.p_s, n if ctx.p_i < ctx.p_s else 1, "uniform", (plan.k_p, plan.k_c, ctx.p0))


def verify_plan(ctx: HedgeContext, plan: HedgePlan, n_grid: int = DEFAULT_N,
                eps_rel: float = CERT_EPS_REL, force_oracle: bool = False) -> CertificationReport:
    """Check the three sufficient inequalities; run the grid oracle if they hold.

    ``force_oracle`` runs the oracle even for uncertified plans (the report
    still says uncertified; the oracle numbers are informational).
    """
    check_admissible(ctx, plan)
    q_p_min, q_c_min = min_put_qty(ctx), min_call_qty(ctx)
    report = CertificationReport(
        ineq_put=InequalityCheck(q_p_min <= plan.q_p, q_p_min, plan.q_p),
        ineq_budget=budget_ok(ctx, plan),
        ineq_call=InequalityCheck(q_c_min <= plan.q_c, q_c_min, plan.q_c),
    )
    if not (report.inequalities_hold or force_oracle):
        return report
    eps = eps_rel * ctx.c
    verdict = certify_nonnegative(lambda p: combined_payoff(ctx, plan, p), coverage_grid(ctx, plan, n_grid), eps)
    return CertificationReport(
        report.ineq_put, report.ineq_budget, report.ineq_call,
        oracle_min=verdict.min_value, oracle_argmin=verdict.argmin, n_grid=verdict.n_points, eps=eps,
    )


def _pick_expiry(chain: OptionChain, expiry: date | None) -> date | None:
    if expiry is not None:
        return expiry
    expiries = chain.expiries
    if len(expiries) > 1:
        raise DomainError(f"chain holds {len(expiries)} expiries; choose one")
    return expiries[0] if expiries else None


def optimize_plan(ctx: HedgeContext, chain: OptionChain, expiry: date | None = None) -> HedgePlan:
    """Cheapest strangle from ``chain`` that satisfies all three inequalities.

    Quantities are pinned to the closed-form minima (they depend only on the
    coverage band), so only the strike pair is searched, exhaustively. Ties on
    cost go to the narrower strangle, then to the lower call strike.
    """
    expiry = _pick_expiry(chain, expiry)
    puts = filter_quotes(chain, expiry, "put", (ctx.p_i, ctx.p0))
    calls = filter_quotes(chain, expiry, "call", (ctx.p0, ctx.p_s))
    if not puts or not calls:
        raise InfeasibleError(
            f"no admissible strikes: {len(puts)} puts in [{ctx.p_i:g}, {ctx.p0:g}], "
            f"{len(calls)} calls in [{ctx.p0:g}, {ctx.p_s:g}]"
        )
    q_p, q_c = min_put_qty(ctx), min_call_qty(ctx)
    put_k = np.array([q.strike for q in puts])
    put_d = np.array([mid_price(q) for q in puts])
    call_k = np.array([q.strike for q in calls])
    call_d = np.array([mid_price(q) for q in calls])

    # all pairs at once: rows are puts, columns are calls
    # same operation order as HedgePlan.cost and budget_ok so verdicts agree bit for bit
    cost = q_c * call_d[None, :] + q_p * put_d[:, None]
    worst_il = np.minimum(il_model.il(ctx.params, call_k)[None, :], il_model.il(ctx.params, put_k)[:, None])
    lhs = cost - worst_il
    feasible = lhs <= ctx.pool_income
    violation = lhs - ctx.pool_income
    if not feasible.any():
        i, j = np.unravel_index(int(np.argmin(violation)), violation.shape)
        best = (float(put_k[i]), float(call_k[j]))
        raise InfeasibleError(
            f"no strike pair fits the budget r_p*c={ctx.pool_income:.8g}; smallest overshoot "
            f"{violation[i, j]:.8g} at k_p={best[0]:g}, k_c={best[1]:g}",
            min_violation=float(violation[i, j]),
            best_pair=best,
        )
    width = call_k[None, :] - put_k[:, None]
    ii, jj = np.nonzero(feasible)
    order = np.lexsort((call_k[jj], width[ii, jj], cost[ii, jj]))
    i, j = ii[order[0]], jj[order[0]]
    return HedgePlan(k_c=float(call_k[j]), k_p=float(put_k[i]), q_c=q_c, q_p=q_p,
                     d_c=float(call_d[j]), d_p=float(put_d[i]))


def payoff_curve(ctx: HedgeContext, plan: HedgePlan, prices) -> np.ndarray:
    """Columns ``price, il, strangle, combined``."""
    prices = np.asarray(prices, dtype=float)
    return np.column_stack([
        prices,
        il_model.il(ctx.params, prices),
        strangle_payoff(plan, prices),
        combined_payoff(ctx, plan, prices),
    ])
