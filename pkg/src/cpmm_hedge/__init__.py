"""CPMM pool value replication and impermanent-loss hedging with long strangles."""

from .chain_io import OptionChain, OptionQuote, filter_quotes, mid_price, parse_chain, serialize_chain
from .cpmm import PoolState, implied_price, new_pool, pool_value, relative_return, swap_x_for_y, swap_y_for_x
from .errors import DataError, DomainError, EvaluationError, InfeasibleError, ParseError
from .il_model import PositionParams, il, il_derivative, v_hold, v_pool
from .oracle import GridSpec, certify_nonnegative, grid_min
from .replication import (
    ReplicationPortfolio,
    StrikeGrid,
    bond_notional,
    build_portfolio,
    decompose,
    futures_notional,
    option_density,
    portfolio_payoff,
    portfolio_present_value,
    replication_error,
)
from .strangle import (
    CertificationReport,
    HedgeContext,
    HedgePlan,
    budget_ok,
    combined_payoff,
    min_call_qty,
    min_put_qty,
    optimize_plan,
    strangle_payoff,
    verify_plan,
)

__version__ = "0.1.0"
