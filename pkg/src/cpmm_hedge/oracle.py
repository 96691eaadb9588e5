"""Brute-force grid minimisation used to certify payoff non-negativity.

Every payoff handled here is piecewise smooth with known kinks, so the grid
always contains the interval endpoints plus any caller-supplied breakpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, EvaluationError

DEFAULT_N = 10_000


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    n: int = DEFAULT_N
    spacing: str = "uniform"
    breakpoints: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not (self.lo > 0 and math.isfinite(self.hi) and self.lo <= self.hi):
            raise DomainError(f"need 0 < lo <= hi, got [{self.lo!r}, {self.hi!r}]")
        if self.spacing not in ("uniform", "geometric"):
            raise DomainError(f"unknown spacing {self.spacing!r}")
        if self.n < 1 or (self.n == 1 and self.lo != self.hi):
            raise DomainError(f"n must be >= 2 on a non-degenerate interval, got {self.n}")
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))

    def points(self) -> np.ndarray:
        """Sorted, de-duplicated grid including endpoints and in-range breakpoints."""
        if self.lo == self.hi:
            return np.array([self.lo])
        make = np.geomspace if self.spacing == "geometric" else np.linspace
        pts = make(self.lo, self.hi, self.n)
        pts[0], pts[-1] = self.lo, self.hi
        extra = [b for b in self.breakpoints if self.lo <= b <= self.hi]
        if extra:
            pts = np.concatenate([pts, extra])
        return np.unique(pts)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    min_value: float
    argmin: float
    eps: float
    n_points: int

    @property
    def witness(self) -> tuple[float, float] | None:
        return None if self.passed else (self.argmin, self.min_value)


def evaluate(f: Callable, prices: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on ``prices``, vectorised when ``f`` accepts arrays.

    Falls back to point-by-point evaluation so a failure can be pinned to the
    offending price.
    """
    try:
        vals = np.asarray(f(prices), dtype=float)
        if vals.shape != prices.shape:
            raise ValueError("evaluator is not vectorised")
    except Exception:
        vals = np.empty_like(prices)
        for i, p in enumerate(prices):
            try:
                vals[i] = float(f(float(p)))
            except Exception as exc:
                raise EvaluationError(float(p), exc) from exc
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        raise EvaluationError(float(prices[bad[0]]))
    return vals


def _scan(f, spec):
    prices = spec.points()
    vals = evaluate(f, prices)
    # argmin returns the first index, i.e. the lowest price on ties
    i = int(np.argmin(vals))
    return float(vals[i]), float(prices[i]), prices.size


def grid_min(f: Callable, spec: GridSpec) -> tuple[float, float]:
    """Exact minimum of ``f`` over the grid points and the (lowest) price attaining it."""
    lo, arg, _ = _scan(f, spec)
    return lo, arg


def certify_nonnegative(f: Callable, spec: GridSpec, eps: float = 0.0) -> Verdict:
    if eps < 0:
        raise DomainError(f"eps must be >= 0, got {eps!r}")
    lo, arg, n = _scan(f, spec)
    return Verdict(lo >= -eps, lo, arg, eps, n)


def with_breakpoints(spec: GridSpec, extra: Sequence[float]) -> GridSpec:
    return GridSpec(spec.lo, spec.hi, spec.n, spec.spacing, spec.breakpoints + tuple(extra))
