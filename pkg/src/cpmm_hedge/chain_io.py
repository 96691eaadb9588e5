"""Options-chain snapshots: typed quotes plus CSV/JSON readers and writers.

CSV header (column order as written; extra columns are ignored)::

    underlying,snapshot_time,spot,kind,strike,expiry,bid,ask,mark,premium_ccy

Absent premiums are empty strings. Premiums quoted in the base asset
(``premium_ccy=base``, the Deribit convention) are converted to quote currency
on ingestion by multiplying by the snapshot spot.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timezone
from typing import IO, Iterable

from .errors import DataError, ParseError

log = logging.getLogger(__name__)

CSV_COLUMNS = ("underlying", "snapshot_time", "spot", "kind", "strike", "expiry", "bid", "ask", "mark", "premium_ccy")
KINDS = ("call", "put")
CURRENCIES = ("quote", "base")


def parse_timestamp(text: str) -> datetime:
    """ISO-8601 timestamp, naive values taken as UTC."""
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def parse_expiry(text: str) -> date:
    # venues share a daily expiry cut, so intraday times are dropped
    text = text.strip()
    if len(text) == 10:
        return date.fromisoformat(text)
    return parse_timestamp(text).date()


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def format_number(x: float) -> str:
    """Shortest of ``%.15g`` and ``repr`` that still round-trips exactly."""
    s = format(x, ".15g")
    return s if float(s) == x else repr(x)


@dataclass(frozen=True)
class OptionQuote:
    kind: str
    strike: float
    expiry: date
    bid: float | None = None
    ask: float | None = None
    mark: float | None = None
    premium_ccy: str = "quote"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DataError(f"kind must be call or put, got {self.kind!r}")
        if self.premium_ccy not in CURRENCIES:
            raise DataError(f"premium_ccy must be quote or base, got {self.premium_ccy!r}")
        if not (self.strike > 0 and math.isfinite(self.strike)):
            raise DataError(f"strike must be positive, got {self.strike!r}")
        for name in ("bid", "ask", "mark"):
            v = getattr(self, name)
            if v is not None and not (v >= 0 and math.isfinite(v)):
                raise DataError(f"{name} must be a non-negative number, got {v!r}")
        if self.bid is not None and self.ask is not None and self.bid > self.ask:
            raise DataError(f"bid {self.bid!r} above ask {self.ask!r} at strike {self.strike!r}")

    @property
    def key(self) -> tuple[str, float, date]:
        return (self.kind, self.strike, self.expiry)

    def in_quote_ccy(self, spot: float) -> OptionQuote:
        if self.premium_ccy == "quote":
            return self
        scale = lambda v: None if v is None else v * spot
        return replace(self, bid=scale(self.bid), ask=scale(self.ask), mark=scale(self.mark), premium_ccy="quote")


@dataclass(frozen=True)
class OptionChain:
    underlying: str
    spot: float
    snapshot_time: datetime
    quotes: tuple[OptionQuote, ...] = field(default=())

    def __post_init__(self):
        if not (self.spot > 0 and math.isfinite(self.spot)):
            raise DataError(f"spot must be positive, got {self.spot!r}")
        object.__setattr__(self, "quotes", tuple(self.quotes))
        seen = set()
        for q in self.quotes:
            if q.key in seen:
                raise DataError(f"duplicate quote {q.kind} {q.strike!r} {q.expiry.isoformat()}")
            seen.add(q.key)

    @property
    def expiries(self) -> list[date]:
        return sorted({q.expiry for q in self.quotes})


def mid_price(q: OptionQuote) -> float:
    """Mid of bid/ask when both sides exist, otherwise the mark."""
    if q.bid is not None and q.ask is not None:
        return (q.bid + q.ask) / 2
    if q.mark is not None:
        return q.mark
    raise DataError(f"no usable price for {q.kind} {q.strike!r} {q.expiry.isoformat()}")


def filter_quotes(chain: OptionChain, expiry: date | None = None, kind: str | None = None,
                  strike_band: tuple[float, float] | None = None) -> list[OptionQuote]:
    """Quotes matching every given predicate, sorted by strike (band inclusive)."""
    lo, hi = strike_band if strike_band is not None else (-math.inf, math.inf)
    if lo > hi:
        raise DataError(f"empty strike band [{lo!r}, {hi!r}]")
    out = [
        q for q in chain.quotes
        if (expiry is None or q.expiry == expiry)
        and (kind is None or q.kind == kind)
        and lo <= q.strike <= hi
    ]
    return sorted(out, key=lambda q: (q.strike, q.kind, q.expiry))


def _num(text: str, name: str, line: int, optional: bool = True) -> float | None:
    text = text.strip()
    if not text:
        if optional:
            return None
        raise ParseError(f"missing {name}", line)
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"bad number for {name}: {text!r}", line) from None


def _read_text(source: str | IO[str]) -> str:
    return source if isinstance(source, str) else source.read()


def _parse_csv(text: str) -> OptionChain:
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    missing = [c for c in CSV_COLUMNS if c not in header]
    if missing:
        raise ParseError(f"missing required columns: {', '.join(missing)}", 1)
    extra = [c for c in header if c not in CSV_COLUMNS]
    if extra:
        log.warning("ignoring unknown chain columns: %s", ", ".join(extra))

    meta = None
    quotes = []
    for row in reader:
        line = reader.line_num
        if None in row or any(row[c] is None for c in CSV_COLUMNS):
            raise ParseError("wrong number of fields", line)
        try:
            spot = _num(row["spot"], "spot", line, optional=False)
            this_meta = (row["underlying"].strip(), parse_timestamp(row["snapshot_time"]), spot)
            expiry = parse_expiry(row["expiry"])
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), line) from None
        if meta is None:
            meta = this_meta
            if not spot > 0:
                raise DataError(f"line {line}: spot must be positive, got {spot!r}")
        elif this_meta != meta:
            raise ParseError("underlying/snapshot_time/spot differ from the first row", line)
        try:
            q = OptionQuote(
                kind=row["kind"].strip(),
                strike=_num(row["strike"], "strike", line, optional=False),
                expiry=expiry,
                bid=_num(row["bid"], "bid", line),
                ask=_num(row["ask"], "ask", line),
                mark=_num(row["mark"], "mark", line),
                premium_ccy=row["premium_ccy"].strip() or "quote",
            )
        except ParseError:
            raise
        except DataError as exc:
            raise DataError(f"line {line}: {exc}") from None
        quotes.append(q.in_quote_ccy(spot))
    if meta is None:
        raise ParseError("chain has no rows; spot and underlying unknown", 1)
    return OptionChain(meta[0], meta[2], meta[1], tuple(quotes))


def _parse_json(text: str) -> OptionChain:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    try:
        spot = float(obj["spot"])
        if not spot > 0:
            raise DataError(f"spot must be positive, got {spot!r}")
        quotes = []
        for i, qd in enumerate(obj.get("quotes", [])):
            get = lambda name: None if qd.get(name) in (None, "") else float(qd[name])
            try:
                q = OptionQuote(
                    kind=qd["kind"],
                    strike=float(qd["strike"]),
                    expiry=parse_expiry(qd["expiry"]),
                    bid=get("bid"),
                    ask=get("ask"),
                    mark=get("mark"),
                    premium_ccy=qd.get("premium_ccy", "quote"),
                )
            except (DataError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"quote {i}: {exc}") from None
            quotes.append(q.in_quote_ccy(spot))
        return OptionChain(str(obj["underlying"]), spot, parse_timestamp(obj["snapshot_time"]), tuple(quotes))
    except KeyError as exc:
        raise ParseError(f"missing field {exc}") from None


def parse_chain(source: str | IO[str], format: str = "csv") -> OptionChain:
    """Read a chain from text or a text stream in ``csv`` or ``json`` format."""
    text = _read_text(source)
    if format == "csv":
        return _parse_csv(text)
    if format == "json":
        return _parse_json(text)
    raise ValueError(f"unknown chain format {format!r}")


def load_chain(path: str) -> OptionChain:
    fmt = "json" if str(path).lower().endswith(".json") else "csv"
    with open(path, newline="") as fh:
        return parse_chain(fh, fmt)


def _opt(v: float | None) -> str:
    return "" if v is None else format_number(v)


def serialize_chain(chain: OptionChain, format: str = "csv") -> str:
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for q in chain.quotes:
            w.writerow([
                chain.underlying, format_timestamp(chain.snapshot_time), format_number(chain.spot),
                q.kind, format_number(q.strike), q.expiry.isoformat(),
                _opt(q.bid), _opt(q.ask), _opt(q.mark), q.premium_ccy,
            ])
        return buf.getvalue()
    if format == "json":
        quotes = []
        for q in chain.quotes:
            d = {"kind": q.kind, "strike": q.strike, "expiry": q.expiry.isoformat()}
            for name in ("bid", "ask", "mark"):
                if getattr(q, name) is not None:
                    d[name] = getattr(q, name)
            d["premium_ccy"] = q.premium_ccy
            quotes.append(d)
        obj = {
            "underlying": chain.underlying,
            "snapshot_time": format_timestamp(chain.snapshot_time),
            "spot": chain.spot,
            "quotes": quotes,
        }
        return json.dumps(obj, indent=2) + "\n"
    raise ValueError(f"unknown chain format {format!r}")


def chain_from_quotes(quotes: Iterable[OptionQuote], spot: float, underlying: str = "ETH-USD",
                      snapshot_time: datetime | None = None) -> OptionChain:
    """Convenience constructor for synthetic chains."""
    when = snapshot_time or datetime(2024, 1, 1, tzinfo=timezone.utc)
    return OptionChain(underlying, spot, when, tuple(q.in_quote_ccy(spot) for q in quotes))
