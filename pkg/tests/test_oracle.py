import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpmm_hedge.errors import DomainError, EvaluationError
from cpmm_hedge.il_model import PositionParams, il
from cpmm_hedge.oracle import GridSpec, certify_nonnegative, grid_min


def test_constant_min_at_lowest_price():
    assert grid_min(lambda p: np.full_like(p, 7.0), GridSpec(3, 9, 11)) == (7.0, 3.0)
    # scalar-only evaluators work too
    assert grid_min(lambda p: 7.0, GridSpec(3, 9, 11)) == (7.0, 3.0)


def test_il_minimum_on_figure_band_is_upper_endpoint():
    params = PositionParams(170_000, 1700)
    value, where = grid_min(lambda p: il(params, p), GridSpec(425, 6800, 10_000))
    # endpoint values: il(425) = -21250, il(6800) = c*(2 - 2.5) = -85000
    assert where == 6800
    assert value == pytest.approx(-85_000, rel=1e-14)


def test_breakpoint_off_grid_is_found():
    kink = 1.2345678
    v = lambda p: np.abs(p - kink) - 1
    plain = grid_min(v, GridSpec(0.5, 2.0, 7))
    assert plain[0] > -1
    assert grid_min(v, GridSpec(0.5, 2.0, 7, breakpoints=(kink,))) == (-1.0, kink)


def test_breakpoints_outside_interval_ignored():
    assert GridSpec(1, 2, 3, breakpoints=(0.5, 1.5, 3)).points().tolist() == [1.0, 1.5, 2.0]


def test_degenerate_interval():
    assert GridSpec(2, 2, 1).points().tolist() == [2.0]
    with pytest.raises(DomainError):
        GridSpec(1, 2, 1)
    with pytest.raises(DomainError):
        GridSpec(2, 1, 5)
    with pytest.raises(DomainError):
        GridSpec(0, 1, 5)


def test_geometric_spacing_endpoints_exact():
    pts = GridSpec(1.7, 1.7e6, 1000, "geometric").points()
    assert pts[0] == 1.7 and pts[-1] == 1.7e6 and len(pts) == 1000


def test_certify_pass_and_fail():
    assert certify_nonnegative(lambda p: np.maximum(p - 3, 0), GridSpec(1, 10, 100)).passed
    verdict = certify_nonnegative(lambda p: p - 1700, GridSpec(1000, 2600, 1000), eps=1e-6)
    assert not verdict.passed
    assert verdict.witness == (1000.0, -700.0)
    with pytest.raises(DomainError):
        certify_nonnegative(lambda p: p, GridSpec(1, 2, 2), eps=-1)


def test_evaluator_failure_names_price():
    def f(p):
        if p > 5:
            raise ZeroDivisionError("boom")
        return p

    with pytest.raises(EvaluationError) as exc:
        grid_min(f, GridSpec(1, 10, 10))
    assert exc.value.price == 6.0


def test_non_finite_value_is_an_error():
    with pytest.raises(EvaluationError) as exc:
        grid_min(lambda p: np.where(p > 2, np.nan, p), GridSpec(1, 3, 3))
    assert exc.value.price == 3.0


@given(st.floats(0.1, 10), st.floats(0.0, 10), st.integers(2, 200), st.integers(1, 4))
def test_refinement_never_raises_the_minimum(lo, width, n, factor):
    f = lambda p: np.sin(7 * p) * np.log1p(p)
    hi = lo + width
    n = 1 if width == 0 else n
    coarse = GridSpec(lo, hi, n)
    # uniform grids with (n-1)*factor + 1 points contain the coarse ones
    fine = GridSpec(lo, hi, 1 if n == 1 else (n - 1) * factor + 1)
    assert set(np.round(coarse.points(), 9)) <= set(np.round(fine.points(), 9))
    assert grid_min(f, fine)[0] <= grid_min(f, coarse)[0] + 1e-12


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.integers(2, 500))
def test_deterministic(lo, width, n):
    f = lambda p: np.cos(p) * p
    spec = GridSpec(lo, lo + width, n, "geometric")
    assert grid_min(f, spec) == grid_min(f, spec)


def test_ties_resolve_to_lowest_price():
    f = lambda p: np.where(np.isclose(p, 2) | np.isclose(p, 4), -1.0, 0.0)
    assert grid_min(f, GridSpec(1, 5, 5)) == (-1.0, 2.0)
