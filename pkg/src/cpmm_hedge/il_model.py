"""Impermanent loss of a constant-product LP position against holding.

A position is described by its entry capital ``c`` (quote currency) and entry
price ``p0`` (quote per base). Entering a CPMM at the prevailing price forces a
50/50 split by value, so the position starts with ``c/2`` in quote currency and
``c/(2*p0)`` units of the base asset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# curve emitters clamp prices to this fraction of p0 to stay off the p -> 0 singularity
CURVE_PRICE_FLOOR = 1e-12


@dataclass(frozen=True)
class PositionParams:
    c: float
    p0: float

    def __post_init__(self):
        for name in ("c", "p0"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")

    @property
    def quote_units(self) -> float:
        return self.c / 2

    @property
    def base_units(self) -> float:
        return self.c / (2 * self.p0)

    @property
    def k(self) -> float:
        """Invariant of a pool holding exactly this position."""
        return self.quote_units * self.base_units


def _check_price(p):
    arr = np.asarray(p, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"price must be positive, got {p!r}")
    return arr


def _out(val, p):
    return float(val) if np.ndim(p) == 0 else val


def v_pool(params: PositionParams, p):
    """Value of the pooled position at price ``p``: ``c*sqrt(p/p0)``."""
    arr = _check_price(p)
    return _out(params.c * np.sqrt(arr / params.p0), p)


def v_hold(params: PositionParams, p):
    arr = _check_price(p)
    return _out(params.c / 2 * (arr / params.p0 + 1), p)


def _sqrt_ratio_minus_one(params: PositionParams, arr):
    # sqrt(p/p0) - 1 without cancellation near p0
    return (arr - params.p0) / (params.p0 + np.sqrt(arr * params.p0))


def il(params: PositionParams, p):
    """Impermanent loss ``v_pool - v_hold`` (non-positive, zero only at p0).

    Evaluated as ``-(c/2) * (sqrt(p/p0) - 1)**2``, which equals
    ``c * (sqrt(p/p0) - (p/p0 + 1)/2)`` but keeps full relative precision
    close to the entry price. Accepts a scalar or an array of prices.
    """
    arr = _check_price(p)
    d = _sqrt_ratio_minus_one(params, arr)
    return _out(0.0 - 0.5 * params.c * d * d, p)


def il_derivative(params: PositionParams, p):
    """``(c / (2 p0)) * (sqrt(p0/p) - 1)``: positive below p0, negative above."""
    arr = _check_price(p)
    # sqrt(p0/p) - 1 = (p0 - p) / (p + sqrt(p p0))
    return _out(params.c / (2 * params.p0) * (params.p0 - arr) / (arr + np.sqrt(arr * params.p0)), p)


def il_curve(params: PositionParams, lo: float, hi: float, n: int, spacing: str = "geometric"):
    """Rows ``(price, il, v_pool, v_hold)`` on a grid over ``[lo, hi]``."""
    floor = CURVE_PRICE_FLOOR * params.p0
    lo, hi = max(lo, floor), max(hi, floor)
    if n == 1:
        prices = np.array([lo])
    elif spacing == "geometric":
        prices = np.geomspace(lo, hi, n)
    else:
        prices = np.linspace(lo, hi, n)
    # geomspace/linspace do not always hit the endpoints bit-exactly
    prices[0], prices[-1] = lo, hi
    if n >= 3 and lo < params.p0 < hi:
        # snap the closest interior point onto p0 so the zero-loss row is present
        j = 1 + int(np.argmin(np.abs(prices[1:-1] - params.p0)))
        prices[j] = params.p0
    return np.column_stack([prices, il(params, prices), v_pool(params, prices), v_hold(params, prices)])
