"""Tick-by-tick forecasting loop with two competing importance pipelines.

For every predicted event the trailing window is turned into a feature
matrix, and each pipeline (forest MDI or gradient-descent weights) runs
importance -> weighting -> correlation distance -> K selection -> RBF fit,
then forecasts the mid-price ``horizon`` events ahead. A lookback-error
rule decides which pipeline is active.
"""

from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

from .cluster import ClusterSearchConfig, select_k
from .errors import Diverged, EmptySpan, LengthMismatch, SeriesTooShort, TickcastError
from .features import FeatureSet, KernelParams, Standardizer, feature_block
from .forest import ForestConfig, fit_forest, mdi_importance
from .gd import GdConfig, gd_fit
from .geometry import apply_importance, correlation_matrix, distance_matrix
from .lob import WindowPlan, fold_plan
from .rbf import RbfModel, fit_rbfnn, predict

log = logging.getLogger(__name__)

METHODS = ("MDI", "GD")
ANCHORS = ("last_mid", "window_mean", "none")


@dataclass(frozen=True)
class PipelineConfig:
    feature_set: str = "simple"
    kernel: KernelParams = field(default_factory=KernelParams)
    drop_raw: bool = False
    window: WindowPlan = field(default_factory=WindowPlan)
    folds: int = 5
    horizon: int = 1
    forest: ForestConfig = field(default_factory=ForestConfig)
    gd: GdConfig = field(default_factory=GdConfig)
    cluster: ClusterSearchConfig = field(default_factory=ClusterSearchConfig)
    ridge: float | None = None
    rbf_n_init: int = 10
    target_anchor: str = "last_mid"
    selector_lookback: int = 10
    master_seed: int = 0

    def __post_init__(self):
        FeatureSet(self.feature_set)
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.window.window_len < self.horizon + 3:
            raise ValueError("window too short for the horizon")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.target_anchor not in ANCHORS:
            raise ValueError(f"target_anchor must be one of {ANCHORS}")
        if self.selector_lookback < 1:
            raise ValueError("selector_lookback must be >= 1")


@dataclass(frozen=True)
class EventRecord:
    t: int
    fold: int
    prediction_mdi: float
    prediction_gd: float
    actual: float
    sq_err_mdi: float
    sq_err_gd: float
    k_mdi: int
    k_gd: int
    active_method: str
    train_mse_mdi: float
    train_mse_gd: float
    failed_mdi: bool = False
    failed_gd: bool = False

    def prediction(self, method: str) -> float:
        return self.prediction_mdi if method == "MDI" else self.prediction_gd

    def sq_err(self, method: str) -> float:
        return self.sq_err_mdi if method == "MDI" else self.sq_err_gd


@dataclass(frozen=True)
class FittedPipeline:
    method: str
    model: RbfModel | None
    k: int
    importance: np.ndarray | None
    train_mse: float
    failed: bool = False

    def forecast(self, x_row, anchor: float) -> float:
        if self.model is None:
            return anchor
        return float(predict(self.model, x_row)[0]) + anchor


@dataclass(frozen=True)
class StepResult:
    mdi: FittedPipeline
    gd: FittedPipeline
    prediction_mdi: float
    prediction_gd: float


@dataclass(frozen=True)
class Metrics:
    fold: object  # int or "all"
    method: str
    n_events: int
    mse_train: float
    mse_test: float
    rmse_train: float
    rmse_test: float
    rrmse_test: float


@dataclass(frozen=True)
class MetricsReport:
    rows: tuple  # Metrics per (fold, method), folds 1-based
    overall: dict  # method -> Metrics, including "SELECTED"
    regime_changes: int
    mean_events_between_changes: float
    k_histogram: dict  # method -> {K: count}
    n_failed: dict
    n_predicted: int


@dataclass(frozen=True)
class RunResult:
    report: MetricsReport
    trace: tuple


def mse(y, y_hat) -> float:
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape or y.size == 0:
        raise LengthMismatch(f"lengths {y.size} and {y_hat.size}")
    return float(np.mean((y - y_hat) ** 2))


def rmse(y, y_hat) -> float:
    return float(np.sqrt(mse(y, y_hat)))


def rrmse(rmse_val: float, mid_prices) -> float:
    mids = np.asarray(mid_prices, dtype=np.float64)
    if mids.size == 0:
        raise EmptySpan("no mid-prices in span")
    m = float(mids.mean())
    if not m > 0:
        raise EmptySpan("mean mid-price must be positive")
    return rmse_val / m


def _seeds(master_seed: int, t: int, method: str) -> tuple[int, int, int]:
    code = METHODS.index(method)
    s = np.random.SeedSequence([int(master_seed) & (2**63 - 1), t, code]).generate_state(3)
    return int(s[0]), int(s[1]), int(s[2])


def _anchors(mids_rows, y, mode):
    if mode == "last_mid":
        return mids_rows
    if mode == "window_mean":
        return np.full_like(y, y.mean())
    return np.zeros_like(y)


def _importance(method, X, Z, y, cfg, seed, prev_theta):
    if method == "MDI":
        forest = fit_forest(X, y, replace(cfg.forest, seed=seed))
        return mdi_importance(forest)
    try:
        return gd_fit(Z, y, cfg.gd)
    except Diverged:
        try:
            return gd_fit(Z, y, replace(cfg.gd, learning_rate=cfg.gd.learning_rate / 10))
        except Diverged:
            if prev_theta is None:
                raise
            log.debug("GD diverged twice; reusing previous weights")
            return prev_theta


def fit_pipeline(method: str, X, mids, cfg: PipelineConfig, t: int, prev_theta=None) -> FittedPipeline:
    """Fit one pipeline on a window of W raw feature rows and their mid-prices.

    Rows ``0..W-h-1`` are training inputs, their targets are the mid-prices
    ``h`` rows later. ``t`` is the event index of the last window row and
    only seeds the randomness.
    """
    h = cfg.horizon
    Xtr = X[:-h]
    ytr = mids[h:]
    f_seed, c_seed, r_seed = _seeds(cfg.master_seed, t, method)
    std = Standardizer.fit(Xtr)
    Z = std.transform(Xtr)
    w = _importance(method, Xtr, Z, ytr, cfg, f_seed, prev_theta)
    FI = apply_importance(Z, w)
    dist = distance_matrix(correlation_matrix(FI))
    sel = select_k(dist, replace(cfg.cluster, seed=c_seed))
    anchors = _anchors(mids[:-h], ytr, cfg.target_anchor)
    offset = anchors[0] if cfg.target_anchor == "window_mean" else 0.0
    resid = ytr - anchors + offset
    model = fit_rbfnn(Xtr, resid, sel.k, r_seed, ridge=cfg.ridge, n_init=cfg.rbf_n_init,
                      shift=std.mean, mult=w / std.scale, target_offset=offset,
                      max_iter=cfg.cluster.kmeans_max_iter, tol=cfg.cluster.tol)
    fitted = predict(model, Xtr) - offset + anchors
    return FittedPipeline(method, model, sel.k, w, float(np.mean((fitted - ytr) ** 2)))


def _anchor_for(fp: FittedPipeline, cfg: PipelineConfig, last_mid: float) -> float:
    if cfg.target_anchor == "last_mid" or fp.model is None:
        return last_mid
    return 0.0  # window_mean offset lives inside the model


def step(X, mids, cfg: PipelineConfig, t: int, prev: dict | None = None) -> StepResult:
    """Fit both pipelines on one window and forecast the event ``t + horizon``.

    A pipeline that raises falls back to persistence (last mid-price) and is
    flagged as failed.
    """
    prev = prev or {}
    out = {}
    for method in METHODS:
        old = prev.get(method)
        try:
            out[method] = fit_pipeline(method, X, mids, cfg, t,
                                       None if old is None else old.importance)
        except (TickcastError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            log.debug("%s pipeline failed at t=%d: %s", method, t, exc)
            k = old.k if old is not None else 2
            out[method] = FittedPipeline(method, None, k, None if old is None else old.importance,
                                         float("nan"), failed=True)
    x_last = X[-1:]
    last_mid = float(mids[-1])
    preds = {m: out[m].forecast(x_last, _anchor_for(out[m], cfg, last_mid)) for m in METHODS}
    return StepResult(out["MDI"], out["GD"], preds["MDI"], preds["GD"])


def competitive_select(history, lookback: int = 10, current: str = "MDI") -> str:
    """Pipeline with the lower summed squared error over the last ``lookback`` records."""
    recent = list(history)[-lookback:] if lookback > 0 else []
    if not recent:
        return current
    e_mdi = sum(r.sq_err_mdi for r in recent)
    e_gd = sum(r.sq_err_gd for r in recent)
    if e_mdi < e_gd:
        return "MDI"
    if e_gd < e_mdi:
        return "GD"
    return current


def regime_changes(active) -> int:
    active = list(active)
    return sum(a != b for a, b in zip(active, active[1:]))


def _metrics(fold, method, records, mids_attr="actual") -> Metrics:
    sq = np.array([r.sq_err(method) if method != "SELECTED" else r.sq_err(r.active_method) for r in records])
    tr_key = {"MDI": "train_mse_mdi", "GD": "train_mse_gd"}
    if method == "SELECTED":
        tr = np.array([getattr(r, tr_key[r.active_method]) for r in records])
    else:
        tr = np.array([getattr(r, tr_key[method]) for r in records])
    tr = tr[np.isfinite(tr)]
    mse_test = float(sq.mean())
    mse_train = float(tr.mean()) if tr.size else float("nan")
    rmse_test = float(np.sqrt(mse_test))
    actual = np.array([getattr(r, mids_attr) for r in records])
    return Metrics(fold, method, len(records), mse_train, mse_test, float(np.sqrt(mse_train)),
                   rmse_test, rrmse(rmse_test, actual))


def build_report(trace, n_folds: int) -> MetricsReport:
    rows = []
    for k in range(n_folds):
        recs = [r for r in trace if r.fold == k + 1]
        for m in METHODS:
            rows.append(_metrics(k + 1, m, recs))
    overall = {m: _metrics("all", m, trace) for m in (*METHODS, "SELECTED")}
    active = [r.active_method for r in trace]
    changes = regime_changes(active)
    hist = {
        "MDI": dict(sorted(Counter(r.k_mdi for r in trace).items())),
        "GD": dict(sorted(Counter(r.k_gd for r in trace).items())),
    }
    failed = {"MDI": sum(r.failed_mdi for r in trace), "GD": sum(r.failed_gd for r in trace)}
    return MetricsReport(tuple(rows), overall, changes, len(trace) / (changes + 1), hist, failed, len(trace))


def first_predicted_event(cfg: PipelineConfig) -> int:
    return cfg.window.window_len - 1 + cfg.horizon


def run(series, cfg: PipelineConfig = PipelineConfig(), progress=None) -> RunResult:
    """Predict every event after the warm-up window and aggregate per fold.

    The window ending at event ``t`` forecasts event ``t + horizon``;
    models are refitted every ``window.step`` events and reused in between.
    """
    n = len(series)
    W, h = cfg.window.window_len, cfg.horizon
    p0 = first_predicted_event(cfg)
    if n < cfg.folds:
        raise SeriesTooShort(f"{n} events cannot form {cfg.folds} folds")
    plan = fold_plan(n, cfg.folds)
    if p0 >= plan.boundaries[0].stop:
        raise SeriesTooShort(
            f"first fold ends at event {plan.boundaries[0].stop} but the first forecast is event {p0}")
    fold_of = np.empty(n, dtype=np.int64)
    for k, rng in enumerate(plan.boundaries):
        fold_of[rng.start:rng.stop] = k + 1

    mid_all = series.mid
    trace = []
    fitted = {}
    active = "MDI"
    for p in range(p0, n):
        t = p - h
        lo = t - W + 1
        X = feature_block(series, lo, t + 1, cfg.feature_set, cfg.kernel, cfg.drop_raw)
        mids = mid_all[lo:t + 1]
        if (p - p0) % cfg.window.step == 0 or not fitted:
            res = step(X, mids, cfg, t, fitted)
            fitted = {"MDI": res.mdi, "GD": res.gd}
            preds = {"MDI": res.prediction_mdi, "GD": res.prediction_gd}
        else:
            last_mid = float(mids[-1])
            preds = {m: fp.forecast(X[-1:], _anchor_for(fp, cfg, last_mid)) for m, fp in fitted.items()}
        # records whose outcome is already observed at time t
        known = trace[:len(trace) - (h - 1)] if h > 1 else trace
        active = competitive_select(known, cfg.selector_lookback, active)
        actual = float(mid_all[p])
        rec = EventRecord(
            t=p, fold=int(fold_of[p]),
            prediction_mdi=preds["MDI"], prediction_gd=preds["GD"], actual=actual,
            sq_err_mdi=(preds["MDI"] - actual) ** 2, sq_err_gd=(preds["GD"] - actual) ** 2,
            k_mdi=fitted["MDI"].k, k_gd=fitted["GD"].k, active_method=active,
            train_mse_mdi=fitted["MDI"].train_mse, train_mse_gd=fitted["GD"].train_mse,
            failed_mdi=fitted["MDI"].failed, failed_gd=fitted["GD"].failed,
        )
        trace.append(rec)
        if progress is not None:
            progress(p, n)
    return RunResult(build_report(trace, cfg.folds), tuple(trace))


def bench(cfg: PipelineConfig | None = None, n_steps: int = 200, seed: int = 0) -> dict:
    """Time full two-pipeline steps on a synthetic AR(1) series; returns ms statistics."""
    from .data import SyntheticSpec, gen_synthetic

    cfg = cfg or PipelineConfig(feature_set="extended")
    W = cfg.window.window_len
    series = gen_synthetic(SyntheticSpec(n_events=W + n_steps + 1, seed=seed))
    mids = series.mid
    # first call compiles the numba kernels
    step(feature_block(series, 0, W, cfg.feature_set, cfg.kernel, cfg.drop_raw), mids[:W], cfg, W - 1)
    times = []
    prev = None
    for i in range(n_steps):
        X = feature_block(series, i, i + W, cfg.feature_set, cfg.kernel, cfg.drop_raw)
        t0 = time.perf_counter()
        res = step(X, mids[i:i + W], cfg, i + W - 1, prev)
        times.append((time.perf_counter() - t0) * 1e3)
        prev = {"MDI": res.mdi, "GD": res.gd}
    times = np.array(times)
    return {"n_steps": n_steps, "median_ms": float(np.median(times)), "mean_ms": float(times.mean()),
            "p90_ms": float(np.percentile(times, 90)), "max_ms": float(times.max())}
