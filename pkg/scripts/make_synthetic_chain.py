"""Write a synthetic ETH options chain in the Deribit style (premiums in ETH).

The chain is NOT market data: premiums are Black-Scholes prices at a flat
volatility with a fixed relative bid/ask spread.

    python scripts/make_synthetic_chain.py data/synthetic_eth_chain.csv
"""

import argparse
import math
from datetime import date, datetime, timezone

from cpmm_hedge.chain_io import OptionQuote, chain_from_quotes, serialize_chain


def norm_cdf(x):
    return 0.5 * (1 + math.erf(x / math.sqrt(2)))


def black_scholes(kind, spot, strike, vol, t):
    d1 = (math.log(spot / strike) + 0.5 * vol**2 * t) / (vol * math.sqrt(t))
    d2 = d1 - vol * math.sqrt(t)
    if kind == "call":
        return spot * norm_cdf(d1) - strike * norm_cdf(d2)
    return strike * norm_cdf(-d2) - spot * norm_cdf(-d1)


def build(spot=1700.0, vol=0.65, days=30, spread=0.04, strikes=range(700, 2750, 50)):
    t = days / 365
    quotes = []
    for k in strikes:
        for kind in ("put", "call"):
            mid = black_scholes(kind, spot, k, vol, t) / spot
            # Deribit ticks premiums at 0.0001 ETH
            bid = round(mid * (1 - spread / 2), 4)
            ask = max(round(mid * (1 + spread / 2), 4), bid)
            mark = round(mid, 4)
            quotes.append(OptionQuote(kind, float(k), date(2024, 3, 29), bid, ask, mark, "base"))
    when = datetime(2024, 2, 28, 8, 0, tzinfo=timezone.utc)
    return quotes, spot, when


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("path")
    ap.add_argument("--raw", action="store_true", help="keep premiums in ETH instead of converting")
    args = ap.parse_args()
    quotes, spot, when = build()
    if args.raw:
        from cpmm_hedge.chain_io import OptionChain
        chain = OptionChain("ETH-USD", spot, when, tuple(quotes))
    else:
        chain = chain_from_quotes(quotes, spot, "ETH-USD", when)
    fmt = "json" if args.path.endswith(".json") else "csv"
    with open(args.path, "w") as fh:
        fh.write(serialize_chain(chain, fmt))


if __name__ == "__main__":
    main()
