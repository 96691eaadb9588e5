"""Independent reference computations used as test oracles.

Nothing here calls into the code paths under test except where a test
explicitly compares two routes.
"""

import math

import numpy as np


def central_diff(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def second_diff(f, x, h):
    return (f(x + h) - 2 * f(x) + f(x - h)) / h**2


def il_from_reserves(c, p0, p):
    """IL rebuilt from the pool reserves x(p) = sqrt(k/p), y(p) = sqrt(k p)."""
    base0, quote0 = c / (2 * p0), c / 2
    k = base0 * quote0
    base, quote = math.sqrt(k / p), math.sqrt(k * p)
    return (quote + base * p) - (quote0 + base0 * p)


def combined(c, p0, r_p, k_c, k_p, q_c, q_p, cost, p):
    """Pool income + strangle + IL written out from scratch, D charged once."""
    r = p / p0
    loss = c * (np.sqrt(r) - 0.5 * (r + 1))
    return r_p * c + q_c * np.maximum(p - k_c, 0) + q_p * np.maximum(k_p - p, 0) - cost + loss


def smallest_put_qty(c, p0, p_i, k_p, n=10_000, iters=200):
    """Bisect the smallest q_p keeping the payoff >= 0 on [p_i, k_p] with a tight budget.

    The budget is set so the payoff is exactly zero at k_p, which is the
    hardest case the inequalities allow.
    """
    grid = np.linspace(p_i, k_p, n)
    r = grid / p0
    loss = c * (np.sqrt(r) - 0.5 * (r + 1))
    loss_kp = c * (math.sqrt(k_p / p0) - 0.5 * (k_p / p0 + 1))

    def ok(q):
        return np.all(q * (k_p - grid) + loss - loss_kp >= -1e-9 * c)

    lo, hi = 0.0, c / p0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


def enumerate_cheapest(c, p0, r_p, p_i, p_s, q_c, q_p, puts, calls):
    """Plain double loop over (put, call) quotes; returns (cost, k_p, k_c) or None."""
    best = None
    for k_p, d_p in puts:
        if not p_i <= k_p <= p0:
            continue
        for k_c, d_c in calls:
            if not p0 <= k_c <= p_s:
                continue
            cost = q_c * d_c + q_p * d_p
            il_c = c * (math.sqrt(k_c / p0) - 0.5 * (k_c / p0 + 1))
            il_p = c * (math.sqrt(k_p / p0) - 0.5 * (k_p / p0 + 1))
            if cost - min(il_c, il_p) <= r_p * c:
                key = (cost, k_c - k_p, k_c)
                if best is None or key < best[0]:
                    best = (key, k_p, k_c)
    return None if best is None else (best[0][0], best[1], best[2])
