"""Per-tick feature extraction (best-level and kernelised feature sets)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NumericOverflow, RangeTooShort
from .lob import Tick


class FeatureSet(str, Enum):
    SIMPLE = "simple"
    EXTENDED = "extended"


@dataclass(frozen=True)
class KernelParams:
    gamma: float = 1.0
    c0: float = 1.0
    degree: int = 2

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")


SIMPLE_NAMES = ("ask_px", "ask_vol", "bid_px", "bid_vol")
DERIVED_NAMES = (
    "px_sum", "px_diff", "sin_px_prod", "px_prod", "vol_prod", "px_sq_sum",
    "vol_sq_sum", "linear_kernel", "poly_kernel", "sigmoid_kernel", "exp_kernel", "rbf_kernel",
)


def feature_names(feature_set, drop_raw: bool = False) -> tuple[str, ...]:
    if FeatureSet(feature_set) is FeatureSet.SIMPLE:
        return SIMPLE_NAMES
    return DERIVED_NAMES if drop_raw else SIMPLE_NAMES + DERIVED_NAMES


def _derived(pa, va, pb, vb, params: KernelParams):
    # u2..u13 in order; works on scalars and arrays alike
    prod = pa * pb
    diff = pa - pb
    return [
        pa + pb,
        diff,
        np.sin(prod),  # argument ~1e4..1e11: result is sensitive to the last ulp of prod
        prod,
        va * vb,
        pa * pa + pb * pb,
        va * va + vb * vb,
        prod,
        (prod + params.c0) ** params.degree,
        np.tanh(params.gamma * prod + params.c0),
        np.exp(-params.gamma * np.abs(diff)),
        np.exp(-params.gamma * diff * diff),
    ]


def extract_simple(tick: Tick) -> np.ndarray:
    return np.array([tick.ask_px, tick.ask_vol, tick.bid_px, tick.bid_vol], dtype=np.float64)


def extract_extended(tick: Tick, params: KernelParams = KernelParams()) -> np.ndarray:
    """Raw best-level quadruple followed by the twelve derived features (16 values)."""
    pa, va, pb, vb = (np.float64(x) for x in (tick.ask_px, tick.ask_vol, tick.bid_px, tick.bid_vol))
    with np.errstate(over="ignore", invalid="ignore"):
        row = np.array([pa, va, pb, vb, *_derived(pa, va, pb, vb, params)], dtype=np.float64)
    if not np.all(np.isfinite(row)):
        raise NumericOverflow(f"non-finite feature for tick at ts={tick.ts}")
    return row


def feature_block(series, lo: int, hi: int, feature_set=FeatureSet.SIMPLE,
                  params: KernelParams = KernelParams(), drop_raw: bool = False) -> np.ndarray:
    """Vectorised feature rows for ticks ``lo..hi-1``; rows match the scalar extractors."""
    pa, va = series.ask_px[lo:hi], series.ask_vol[lo:hi]
    pb, vb = series.bid_px[lo:hi], series.bid_vol[lo:hi]
    cols = [pa, va, pb, vb]
    if FeatureSet(feature_set) is FeatureSet.EXTENDED:
        with np.errstate(over="ignore", invalid="ignore"):
            derived = _derived(pa, va, pb, vb, params)
        cols = derived if drop_raw else cols + derived
    out = np.column_stack(cols)
    if not np.all(np.isfinite(out)):
        raise NumericOverflow("non-finite feature value in block")
    return out


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    feature_names: tuple
    targets: np.ndarray
    horizon: int

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[0] != self.targets.shape[0]:
            raise ValueError("values must be N x F with N targets")
        if self.values.shape[1] != len(self.feature_names):
            raise ValueError("one name per column required")
        if self.values.shape[0] < 2:
            raise ValueError("need at least two rows")
        if not (np.all(np.isfinite(self.values)) and np.all(np.isfinite(self.targets))):
            raise ValueError("feature matrix contains NaN/Inf")

    @property
    def shape(self):
        return self.values.shape


def build_matrix(series, index_range: range, feature_set=FeatureSet.SIMPLE,
                 params: KernelParams = KernelParams(), horizon: int = 1,
                 drop_raw: bool = False) -> FeatureMatrix:
    """Rows for ticks ``t`` in the range paired with the mid-price at ``t + horizon``."""
    lo, hi = index_range.start, index_range.stop
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if hi - lo < horizon + 2:
        raise RangeTooShort(f"range of {hi - lo} events too short for horizon {horizon}")
    values = feature_block(series, lo, hi - horizon, feature_set, params, drop_raw)
    mid = series.mid
    targets = mid[lo + horizon:hi].copy()
    return FeatureMatrix(values, feature_names(feature_set, drop_raw), targets, horizon)


@dataclass(frozen=True)
class Standardizer:
    """Column centring and scaling; (near-)constant columns map to exactly zero."""

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X) -> "Standardizer":
        X = np.asarray(X, dtype=np.float64)
        mean = X.mean(axis=0)
        sd = np.sqrt(((X - mean) ** 2).mean(axis=0))
        tiny = sd <= 1e-12 * np.maximum(1.0, np.abs(mean))
        scale = np.where(tiny, np.inf, sd)
        return cls(mean, scale)

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.scale
