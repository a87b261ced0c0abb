"""Level-1 order book events, mid-prices and window/fold partitioning."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import SeriesTooShort, TooFewEvents

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tick:
    ts: int
    ask_px: float
    bid_px: float
    ask_vol: float
    bid_vol: float

    def __post_init__(self):
        if not (self.ask_px > 0 and self.bid_px > 0):
            raise ValueError(f"prices must be positive, got ask={self.ask_px} bid={self.bid_px}")
        if self.ask_vol < 0 or self.bid_vol < 0:
            raise ValueError("volumes must be non-negative")

    @property
    def crossed(self) -> bool:
        return self.bid_px > self.ask_px


def mid_price(tick: Tick) -> float:
    return (tick.ask_px + tick.bid_px) / 2.0


class TickSeries:
    """Columnar, immutable sequence of ticks for one symbol.

    Crossed books (bid above ask) are kept; their count is exposed as
    ``n_crossed`` and logged once at construction.
    """

    __slots__ = ("symbol", "ts", "ask_px", "bid_px", "ask_vol", "bid_vol", "n_crossed")

    def __init__(self, ts, ask_px, bid_px, ask_vol, bid_vol, symbol: str = ""):
        ts = np.asarray(ts, dtype=np.int64)
        cols = [np.asarray(c, dtype=np.float64) for c in (ask_px, bid_px, ask_vol, bid_vol)]
        n = ts.shape[0]
        if any(c.shape != (n,) for c in cols):
            raise ValueError("all columns must be 1-d with the same length")
        ask_px, bid_px, ask_vol, bid_vol = cols
        if n and not (np.all(ask_px > 0) and np.all(bid_px > 0)):
            raise ValueError("prices must be positive")
        if n and (np.any(ask_vol < 0) or np.any(bid_vol < 0)):
            raise ValueError("volumes must be non-negative")
        if n > 1 and np.any(np.diff(ts) < 0):
            raise ValueError("timestamps must be non-decreasing")
        for a in (ts, *cols):
            a.setflags(write=False)
        self.symbol = symbol
        self.ts, self.ask_px, self.bid_px, self.ask_vol, self.bid_vol = ts, ask_px, bid_px, ask_vol, bid_vol
        self.n_crossed = int(np.count_nonzero(bid_px > ask_px))
        if self.n_crossed:
            log.warning("%s: %d crossed quotes (bid > ask)", symbol or "series", self.n_crossed)

    @classmethod
    def from_ticks(cls, ticks, symbol: str = "") -> "TickSeries":
        ticks = list(ticks)
        return cls(
            [t.ts for t in ticks],
            [t.ask_px for t in ticks],
            [t.bid_px for t in ticks],
            [t.ask_vol for t in ticks],
            [t.bid_vol for t in ticks],
            symbol=symbol,
        )

    def __len__(self):
        return self.ts.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return TickSeries(self.ts[i], self.ask_px[i], self.bid_px[i], self.ask_vol[i], self.bid_vol[i], self.symbol)
        return Tick(int(self.ts[i]), float(self.ask_px[i]), float(self.bid_px[i]),
                    float(self.ask_vol[i]), float(self.bid_vol[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def mid(self) -> np.ndarray:
        return (self.ask_px + self.bid_px) / 2.0

    def __repr__(self):
        return f"TickSeries(symbol={self.symbol!r}, n={len(self)})"


@dataclass(frozen=True)
class WindowPlan:
    window_len: int = 100
    step: int = 1

    def __post_init__(self):
        if self.window_len < 2:
            raise ValueError("window_len must be >= 2")
        if not 1 <= self.step <= self.window_len:
            raise ValueError("step must lie in [1, window_len]")


@dataclass(frozen=True)
class FoldPlan:
    n_folds: int
    boundaries: tuple = field(default_factory=tuple)

    def training_span(self, k: int) -> range:
        """Events available for training before fold ``k`` (0-based)."""
        return range(0, self.boundaries[k].start)


def make_windows(series, plan: WindowPlan = WindowPlan()) -> list[range]:
    n = len(series)
    if n < plan.window_len:
        raise SeriesTooShort(f"series has {n} events, window needs {plan.window_len}")
    return [range(i, i + plan.window_len) for i in range(0, n - plan.window_len + 1, plan.step)]


def fold_plan(n_events: int, n_folds: int = 5) -> FoldPlan:
    if n_folds < 2 or n_events < n_folds:
        raise TooFewEvents(f"cannot split {n_events} events into {n_folds} folds")
    base, extra = divmod(n_events, n_folds)
    bounds, start = [], 0
    for k in range(n_folds):
        size = base + (1 if k < extra else 0)
        bounds.append(range(start, start + size))
        start += size
    return FoldPlan(n_folds, tuple(bounds))
