"""Static replication of a terminal payoff with a bond, futures and options.

A twice-differentiable payoff f expanded around an anchor price m is

    f(P) = f(m) + f'(m)(P - m)
           + int_0^m f''(K) (K - P)^+ dK + int_m^inf f''(K) (P - K)^+ dK

The two integrals are discretised with the midpoint rule on strike cells: each
side of the anchor is split into ``n`` cells, one option per cell sits at the
cell midpoint, and its weight is ``f''(K) * cell_width``.

For the CPMM pool value f(P) = 2*sqrt(k*P) every option weight is negative:
the liquidity provider is short convexity at all strikes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .chain_io import OptionChain, mid_price
from .errors import DataError, DomainError

DEFAULT_RANGE_FACTOR = 50.0


def _require_positive(**values: float) -> None:
    for name, v in values.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class StrikeGrid:
    k_min: float
    k_max: float
    n: int
    spacing: str = "geometric"

    def __post_init__(self):
        _require_positive(k_min=self.k_min, k_max=self.k_max)
        if not self.k_min < self.k_max:
            raise DomainError(f"need k_min < k_max, got {self.k_min!r} >= {self.k_max!r}")
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if self.spacing not in ("uniform", "geometric"):
            raise DomainError(f"unknown spacing {self.spacing!r}")

    @classmethod
    def around(cls, m: float, n: int, factor: float = DEFAULT_RANGE_FACTOR, spacing: str = "geometric"):
        """Grid on ``[m/factor, m*factor]``."""
        return cls(m / factor, m * factor, n, spacing)

    def edges(self, lo: float, hi: float) -> np.ndarray:
        make = np.geomspace if self.spacing == "geometric" else np.linspace
        e = make(lo, hi, self.n + 1)
        e[0], e[-1] = lo, hi
        return e

    def cells(self, m: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Midpoint strikes and cell widths ``(put_k, put_dk, call_k, call_dk)``."""
        if not self.k_min < m < self.k_max:
            raise DomainError(f"anchor {m!r} outside strike range ({self.k_min!r}, {self.k_max!r})")
        pe, ce = self.edges(self.k_min, m), self.edges(m, self.k_max)
        return (
            0.5 * (pe[1:] + pe[:-1]), np.diff(pe),
            0.5 * (ce[1:] + ce[:-1]), np.diff(ce),
        )


@dataclass(frozen=True)
class ReplicationPortfolio:
    bond_notional: float
    futures_notional: float
    anchor: float
    put_legs: tuple[tuple[float, float], ...]
    call_legs: tuple[tuple[float, float], ...]
    k_min: float
    k_max: float
    # set when the futures leg is quoted as a long call / short put pair at the anchor
    anchor_options: bool = False
    # CPMM-only diagnostics of what the strike truncation leaves uncovered
    put_tail_shortfall: float | None = None
    call_tail_slope: float | None = None

    @property
    def strikes(self) -> np.ndarray:
        return np.array([k for k, _ in self.put_legs + self.call_legs])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.put_legs + self.call_legs])

    def legs(self) -> list[tuple[str, float, float]]:
        """Rows ``(side, strike, weight)``; anchor options first when expanded."""
        rows = []
        if self.anchor_options:
            rows += [("call", self.anchor, self.futures_notional), ("put", self.anchor, -self.futures_notional)]
        rows += [("put", k, w) for k, w in self.put_legs]
        rows += [("call", k, w) for k, w in self.call_legs]
        return rows


def bond_notional(k: float, m: float) -> float:
    _require_positive(k=k, m=m)
    return 2.0 * math.sqrt(k * m)


def futures_notional(k: float, m: float) -> float:
    _require_positive(k=k, m=m)
    return math.sqrt(k / m)


def option_density(k: float, strike):
    """Second derivative of ``2*sqrt(k*K)`` in K: ``-sqrt(k/K**3)/2``."""
    _require_positive(k=k)
    arr = np.asarray(strike, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"strike must be positive, got {strike!r}")
    out = -0.5 * np.sqrt(k / arr**3)
    return float(out) if np.ndim(strike) == 0 else out


def decompose(
    f: Callable[[float], float],
    df: Callable[[float], float],
    d2f: Callable[[np.ndarray], np.ndarray],
    m: float,
    grid: StrikeGrid,
    anchor_options: bool = False,
) -> ReplicationPortfolio:
    """Discrete bond/futures/options decomposition of an arbitrary C2 payoff.

    ``d2f`` must accept an array of strikes.
    """
    put_k, put_dk, call_k, call_dk = grid.cells(m)
    put_w = np.asarray(d2f(put_k), dtype=float) * put_dk
    call_w = np.asarray(d2f(call_k), dtype=float) * call_dk
    return ReplicationPortfolio(
        bond_notional=float(f(m)),
        futures_notional=float(df(m)),
        anchor=m,
        put_legs=tuple(zip(put_k.tolist(), put_w.tolist())),
        call_legs=tuple(zip(call_k.tolist(), call_w.tolist())),
        k_min=grid.k_min,
        k_max=grid.k_max,
        anchor_options=anchor_options,
    )


def build_portfolio(k: float, m: float, grid: StrikeGrid, anchor_options: bool = False) -> ReplicationPortfolio:
    """Replicating portfolio of the pool value ``2*sqrt(k*P)`` anchored at ``m``."""
    _require_positive(k=k, m=m)
    port = decompose(
        lambda p: bond_notional(k, p),
        lambda p: futures_notional(k, p),
        lambda K: option_density(k, K),
        m,
        grid,
        anchor_options,
    )
    # int_0^kmin |f''(K)| K dK: payoff the missing low puts would add at P -> 0
    # int_kmax^inf |f''(K)| dK: slope lost above the highest call
    return replace(
        port,
        put_tail_shortfall=math.sqrt(k * grid.k_min),
        call_tail_slope=math.sqrt(k / grid.k_max),
    )


def portfolio_payoff(port: ReplicationPortfolio, p_t):
    """Terminal payoff of the portfolio at price(s) ``p_t``."""
    p = np.asarray(p_t, dtype=float)
    if not np.all(p > 0):
        raise DomainError(f"price must be positive, got {p_t!r}")
    flat = p.reshape(-1, 1)
    total = port.bond_notional + port.futures_notional * (flat[:, 0] - port.anchor)
    if port.put_legs:
        pk, pw = np.array(port.put_legs).T
        total = total + np.maximum(pk - flat, 0.0) @ pw
    if port.call_legs:
        ck, cw = np.array(port.call_legs).T
        total = total + np.maximum(flat - ck, 0.0) @ cw
    total = total.reshape(p.shape)
    return float(total) if np.ndim(p_t) == 0 else total


def _quote_premium(chain: OptionChain, kind: str, strike: float, expiry) -> float:
    matches = [
        q for q in chain.quotes
        if q.kind == kind and math.isclose(q.strike, strike, rel_tol=1e-12)
        and (expiry is None or q.expiry == expiry)
    ]
    if not matches:
        raise DataError(f"no {kind} quote for strike {strike!r}")
    if len(matches) > 1:
        raise DataError(f"{kind} strike {strike!r} quoted for several expiries; pass expiry")
    return mid_price(matches[0])


def portfolio_present_value(port: ReplicationPortfolio, bond_price: float, chain: OptionChain, expiry=None) -> float:
    """Price the portfolio off a bond discount factor and an options chain.

    The linear leg is valued as ``f'(m) * (C(m) - P(m))`` so the chain must
    quote both a call and a put at the anchor, plus every leg strike.
    """
    if not 0 < bond_price <= 1:
        raise DomainError(f"bond_price must lie in (0, 1], got {bond_price!r}")
    prem = lambda kind, strike: _quote_premium(chain, kind, strike, expiry)
    pv = port.bond_notional * bond_price
    pv += port.futures_notional * (prem("call", port.anchor) - prem("put", port.anchor))
    pv += sum(w * prem("put", K) for K, w in port.put_legs)
    pv += sum(w * prem("call", K) for K, w in port.call_legs)
    return pv


@dataclass(frozen=True)
class ErrorReport:
    max_rel_error: float
    argmax: float
    prices: np.ndarray = field(repr=False)
    target: np.ndarray = field(repr=False)
    replicated: np.ndarray = field(repr=False)
    # evaluation prices outside [k_min, k_max]; excluded from max_rel_error
    out_of_band: tuple[float, ...] = ()

    @property
    def rel_error(self) -> np.ndarray:
        return np.abs(self.replicated - self.target) / np.abs(self.target)

    def rows(self):
        return zip(self.prices.tolist(), self.target.tolist(), self.replicated.tolist(), self.rel_error.tolist())


def error_report(port: ReplicationPortfolio, target: Callable, prices) -> ErrorReport:
    prices = np.asarray(prices, dtype=float)
    tgt = np.asarray(target(prices), dtype=float)
    rep = portfolio_payoff(port, prices)
    rel = np.abs(rep - tgt) / np.abs(tgt)
    inside = (prices >= port.k_min) & (prices <= port.k_max)
    if inside.any():
        i = int(np.argmax(np.where(inside, rel, -np.inf)))
        worst, arg = float(rel[i]), float(prices[i])
    else:
        worst, arg = math.nan, math.nan
    return ErrorReport(worst, arg, prices, tgt, rep, tuple(prices[~inside].tolist()))


def replication_error(
    k: float,
    m: float,
    grid: StrikeGrid,
    eval_band: tuple[float, float],
    n_eval: int = 1000,
) -> ErrorReport:
    """Max relative error of the pool replication over a geometric evaluation grid."""
    lo, hi = eval_band
    _require_positive(lo=lo, hi=hi)
    if n_eval < 2 or not lo < hi:
        raise DomainError("need n_eval >= 2 and a non-empty evaluation band")
    prices = np.geomspace(lo, hi, n_eval)
    prices[0], prices[-1] = lo, hi
    port = build_portfolio(k, m, grid)
    return error_report(port, lambda p: 2.0 * np.sqrt(k * p), prices)
