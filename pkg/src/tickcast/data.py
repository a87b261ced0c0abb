"""Tick CSV ingestion/writing and synthetic Level-1 series."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadSpec, EmptyFile, ParseError, UnsortedTimestamps
from .lob import TickSeries

HEADER = ("ts_ns", "bid_px", "ask_px", "bid_sz", "ask_sz")
MODELS = ("random_walk", "ar1", "rbf_mixture")


def load_ticks(path, format: str = "csv", symbol: str | None = None) -> TickSeries:
    """Read ``ts_ns,bid_px,ask_px,bid_sz,ask_sz`` rows; line numbers count the header as 1."""
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}")
    path = Path(path)
    ts, bid, ask, bsz, asz = [], [], [], [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyFile(f"{path} is empty")
        if tuple(h.strip() for h in header) != HEADER:
            raise ParseError(1, f"expected header {','.join(HEADER)}, got {','.join(header)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(HEADER):
                raise ParseError(lineno, f"expected {len(HEADER)} fields, got {len(row)}")
            try:
                t = int(row[0])
                b, a, bs, as_ = (float(c) for c in row[1:])
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
            if not all(math.isfinite(v) for v in (b, a, bs, as_)):
                raise ParseError(lineno, "non-finite value")
            if b <= 0 or a <= 0:
                raise ParseError(lineno, f"non-positive price (bid={b}, ask={a})")
            if bs < 0 or as_ < 0:
                raise ParseError(lineno, f"negative size (bid_sz={bs}, ask_sz={as_})")
            if ts and t < ts[-1]:
                raise UnsortedTimestamps(f"line {lineno}: timestamp {t} precedes {ts[-1]}")
            ts.append(t)
            bid.append(b)
            ask.append(a)
            bsz.append(bs)
            asz.append(as_)
    if not ts:
        raise EmptyFile(f"{path} has no data rows")
    return TickSeries(ts, ask, bid, asz, bsz, symbol=path.stem if symbol is None else symbol)


def write_ticks(series: TickSeries, path) -> None:
    # repr() round-trips doubles exactly
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for i in range(len(series)):
            w.writerow([int(series.ts[i]), repr(float(series.bid_px[i])), repr(float(series.ask_px[i])),
                        repr(float(series.bid_vol[i])), repr(float(series.ask_vol[i]))])


@dataclass(frozen=True)
class SyntheticSpec:
    model: str = "ar1"
    n_events: int = 3000
    phi: float = 0.95
    noise: float = 0.01
    base_price: float = 100.0
    tick_size: float = 0.01
    spread_ticks: int = 2
    jitter_prob: float = 0.2
    volume_mean: float = 500.0
    volume_sigma: float = 0.5
    mean_gap_ns: float = 1e6
    start_ts: int = 1_662_039_000_000_000_000
    seed: int = 0
    symbol: str = "SYN"

    def validate(self, min_events: int = 2) -> None:
        if self.model not in MODELS:
            raise BadSpec(f"model must be one of {MODELS}, got {self.model!r}")
        if not -1.0 < self.phi < 1.0:
            raise BadSpec("phi must lie in (-1, 1)")
        if self.n_events < max(min_events, 2):
            raise BadSpec(f"n_events={self.n_events} below the required {max(min_events, 2)}")
        if not (self.noise >= 0 and self.base_price > 0 and self.tick_size > 0):
            raise BadSpec("noise must be >= 0; base_price and tick_size > 0")
        if self.spread_ticks < 0 or not 0 <= self.jitter_prob <= 1:
            raise BadSpec("spread_ticks >= 0 and jitter_prob in [0, 1] required")
        if self.volume_mean <= 0 or self.volume_sigma < 0 or self.mean_gap_ns <= 0:
            raise BadSpec("volume and gap parameters must be positive")


def _rbf_map(phi: float, width: float):
    """Bounded odd map built from two Gaussian bumps at +-width, slope phi at 0."""
    amp = phi * width * math.exp(0.5) / 2.0

    def g(x):
        return amp * (math.exp(-(x - width) ** 2 / (2 * width**2)) - math.exp(-(x + width) ** 2 / (2 * width**2)))

    return g


def gen_synthetic(spec: SyntheticSpec = SyntheticSpec(), min_events: int = 2) -> TickSeries:
    """Mid-price path from the chosen model; quotes straddle it by a whole-tick spread."""
    spec.validate(min_events)
    rng = np.random.default_rng(spec.seed)
    n = spec.n_events
    eps = rng.normal(0.0, spec.noise, n)
    x = np.empty(n)
    if spec.model == "random_walk":
        x = np.cumsum(eps)
    elif spec.model == "ar1":
        x[0] = eps[0] / math.sqrt(1.0 - spec.phi**2)
        for t in range(1, n):
            x[t] = spec.phi * x[t - 1] + eps[t]
    else:
        g = _rbf_map(spec.phi, 5.0 * max(spec.noise, 1e-12))
        x[0] = eps[0]
        for t in range(1, n):
            x[t] = g(x[t - 1]) + eps[t]
    mid = spec.base_price + x

    spread = (spec.spread_ticks + (rng.random(n) < spec.jitter_prob)) * spec.tick_size
    ask = mid + spread / 2.0
    bid = mid - spread / 2.0
    if np.any(bid <= 0):
        raise BadSpec("generated path reaches non-positive prices; raise base_price")

    s = spec.volume_sigma
    vol = lambda: np.maximum(1.0, np.round(spec.volume_mean * np.exp(rng.normal(-s * s / 2, s, n))))
    ask_vol, bid_vol = vol(), vol()
    gaps = np.maximum(1, np.round(rng.exponential(spec.mean_gap_ns, n))).astype(np.int64)
    ts = spec.start_ts + np.cumsum(gaps)
    return TickSeries(ts, ask, bid, ask_vol, bid_vol, symbol=spec.symbol)
