"""Constant-product pool state, swaps and closed-form pool value.

Prices are quoted as units of Y per unit of X, so the implied price of a pool
is ``y / x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError


def _require_positive(**values: float) -> None:
    for name, v in values.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class PoolState:
    x: float
    y: float
    gamma: float = 1.0
    k: float = field(init=False)

    def __post_init__(self):
        _require_positive(x=self.x, y=self.y)
        if not 0 < self.gamma <= 1:
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma!r}")
        object.__setattr__(self, "k", self.x * self.y)

    @property
    def price(self) -> float:
        return implied_price(self)


def new_pool(x: float, y: float, gamma: float = 1.0) -> PoolState:
    return PoolState(x, y, gamma)


def swap_y_for_x(pool: PoolState, dy: float) -> tuple[float, PoolState]:
    """Sell ``dy`` of Y into the pool; return X received and the new state.

    The fee haircut applies to the incoming Y leg: ``(x - dx)(y + gamma*dy) = k``.
    The full ``dy`` is added to reserves, so ``k`` grows when ``gamma < 1``.
    """
    _require_positive(dy=dy)
    # dx = x - k/(y + g*dy); output and remaining reserve are each computed
    # in a form free of cancellation (tiny dy, resp. dy >> y)
    denom = pool.y + pool.gamma * dy
    dx = pool.x * (pool.gamma * dy / denom)
    return dx, PoolState(pool.x * (pool.y / denom), pool.y + dy, pool.gamma)


def swap_x_for_y(pool: PoolState, dx: float) -> tuple[float, PoolState]:
    """Mirror of :func:`swap_y_for_x` with the fee charged on incoming X."""
    _require_positive(dx=dx)
    denom = pool.x + pool.gamma * dx
    dy = pool.y * (pool.gamma * dx / denom)
    return dy, PoolState(pool.x + dx, pool.y * (pool.x / denom), pool.gamma)


def implied_price(pool: PoolState) -> float:
    return pool.y / pool.x


def pool_value(k: float, p: float) -> float:
    """Value of the whole pool in Y units at price ``p``: ``2*sqrt(k*p)``."""
    _require_positive(k=k, p=p)
    return 2.0 * math.sqrt(k * p)


def relative_return(p_prev: float, p_now: float) -> float:
    _require_positive(p_prev=p_prev, p_now=p_now)
    return math.sqrt(p_now / p_prev)
