"""Regression random forest with per-node impurity bookkeeping and MDI importance.

Trees are grown greedily: at each node the split maximising the impurity
reduction over a random feature subset and all midpoint thresholds is taken.
Ties go to the lowest feature index, then the lowest threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DegenerateData, EmptyNode, InvalidSplit


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 50
    max_depth: int = 5
    min_samples_split: int = 4
    feature_subsample: int | None = None  # None -> ceil(F / 3)
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.feature_subsample is not None and self.feature_subsample < 1:
            raise ValueError("feature_subsample must be >= 1")

    def n_split_features(self, n_features: int) -> int:
        if self.feature_subsample is None:
            return max(1, math.ceil(n_features / 3))
        return min(self.feature_subsample, n_features)


@dataclass(frozen=True)
class NodeStats:
    n_samples: int
    impurity: float
    split_feature: int | None = None
    delta: float = 0.0


def node_impurity(targets) -> float:
    y = np.asarray(targets, dtype=np.float64)
    if y.size == 0:
        raise EmptyNode("impurity of an empty node is undefined")
    return float(np.mean((y - y.mean()) ** 2))


def impurity_reduction(parent: NodeStats, left: NodeStats, right: NodeStats) -> float:
    if left.n_samples < 1 or right.n_samples < 1:
        raise InvalidSplit("both children must be non-empty")
    if left.n_samples + right.n_samples != parent.n_samples:
        raise InvalidSplit(
            f"children hold {left.n_samples} + {right.n_samples} samples, parent {parent.n_samples}")
    n = parent.n_samples
    return parent.impurity - (left.n_samples / n) * left.impurity - (right.n_samples / n) * right.impurity


@numba.njit(cache=True, nogil=True)
def _grow_tree(X, y, idx, max_depth, min_split, mtry, cap,
               feature, threshold, left, right, nsamp, impurity, delta, value):
    n = idx.shape[0]
    F = X.shape[1]
    vals = np.empty(n)
    ys = np.empty(n)
    st_start = np.empty(cap, np.int64)
    st_end = np.empty(cap, np.int64)
    st_depth = np.empty(cap, np.int64)
    st_node = np.empty(cap, np.int64)
    sp = 0
    st_start[0], st_end[0], st_depth[0], st_node[0] = 0, n, 0, 0
    sp = 1
    n_nodes = 1
    all_feats = np.arange(F)
    while sp > 0:
        sp -= 1
        start, end, depth, node = st_start[sp], st_end[sp], st_depth[sp], st_node[sp]
        m = end - start
        mean = 0.0
        for i in range(start, end):
            mean += y[idx[i]]
        mean /= m
        imp = 0.0
        for i in range(start, end):
            d = y[idx[i]] - mean
            imp += d * d
        imp /= m
        nsamp[node] = m
        impurity[node] = imp
        value[node] = mean
        if depth >= max_depth or m < min_split or imp <= 0.0:
            continue

        if mtry >= F:
            feats = all_feats
        else:
            feats = np.sort(np.random.permutation(F)[:mtry])

        best_gain = 0.0
        best_f = -1
        best_thr = 0.0
        for f in feats:
            for i in range(m):
                vals[i] = X[idx[start + i], f]
                ys[i] = y[idx[start + i]] - mean
            order = np.argsort(vals[:m], kind="mergesort")
            tot_s = 0.0
            tot_q = 0.0
            for i in range(m):
                tot_s += ys[i]
                tot_q += ys[i] * ys[i]
            cs = 0.0
            cq = 0.0
            for p in range(m - 1):
                o = order[p]
                cs += ys[o]
                cq += ys[o] * ys[o]
                v_lo = vals[o]
                v_hi = vals[order[p + 1]]
                if not v_lo < v_hi:
                    continue
                nl = p + 1
                nr = m - nl
                sse_l = cq - cs * cs / nl
                sse_r = (tot_q - cq) - (tot_s - cs) * (tot_s - cs) / nr
                gain = imp - (max(sse_l, 0.0) + max(sse_r, 0.0)) / m
                # gains within 1e-12 * imp count as ties and keep the earlier split
                if gain > best_gain + 1e-12 * imp:
                    thr = 0.5 * (v_lo + v_hi)
                    if not thr < v_hi:
                        thr = v_lo
                    best_gain = gain
                    best_f = f
                    best_thr = thr

        if best_f < 0 or best_gain <= 1e-12 * imp:
            continue

        # partition idx[start:end] so that left-going samples come first
        i, j = start, end - 1
        while i <= j:
            if X[idx[i], best_f] <= best_thr:
                i += 1
            else:
                tmp = idx[i]
                idx[i] = idx[j]
                idx[j] = tmp
                j -= 1
        mid = i
        nl = mid - start
        nr = end - mid
        ml = 0.0
        for k in range(start, mid):
            ml += y[idx[k]]
        ml /= nl
        mr = 0.0
        for k in range(mid, end):
            mr += y[idx[k]]
        mr /= nr
        il = 0.0
        for k in range(start, mid):
            d = y[idx[k]] - ml
            il += d * d
        il /= nl
        ir = 0.0
        for k in range(mid, end):
            d = y[idx[k]] - mr
            ir += d * d
        ir /= nr

        feature[node] = best_f
        threshold[node] = best_thr
        delta[node] = max(imp - (nl / m) * il - (nr / m) * ir, 0.0)
        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        left[node] = lid
        right[node] = rid
        st_start[sp], st_end[sp], st_depth[sp], st_node[sp] = mid, end, depth + 1, rid
        sp += 1
        st_start[sp], st_end[sp], st_depth[sp], st_node[sp] = start, mid, depth + 1, lid
        sp += 1
    return n_nodes


@numba.njit(cache=True, nogil=True)
def _grow_forest(X, y, seeds, bootstrap, max_depth, min_split, mtry, cap):
    B = seeds.shape[0]
    n = X.shape[0]
    feature = np.full((B, cap), -1, np.int64)
    threshold = np.zeros((B, cap))
    left = np.full((B, cap), -1, np.int64)
    right = np.full((B, cap), -1, np.int64)
    nsamp = np.zeros((B, cap), np.int64)
    impurity = np.zeros((B, cap))
    delta = np.zeros((B, cap))
    value = np.zeros((B, cap))
    n_nodes = np.zeros(B, np.int64)
    for b in range(B):
        np.random.seed(seeds[b])
        if bootstrap:
            idx = np.random.randint(0, n, n).astype(np.int64)
        else:
            idx = np.arange(n).astype(np.int64)
        n_nodes[b] = _grow_tree(X, y, idx, max_depth, min_split, mtry, cap,
                                feature[b], threshold[b], left[b], right[b],
                                nsamp[b], impurity[b], delta[b], value[b])
    return feature, threshold, left, right, nsamp, impurity, delta, value, n_nodes


@dataclass(frozen=True)
class Tree:
    """Flat array representation; ``feature == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    n_samples: np.ndarray
    impurity: np.ndarray
    delta: np.ndarray
    value: np.ndarray

    @property
    def node_count(self) -> int:
        return self.feature.shape[0]

    def node(self, j: int) -> NodeStats:
        f = int(self.feature[j])
        return NodeStats(int(self.n_samples[j]), float(self.impurity[j]),
                         None if f < 0 else f, float(self.delta[j]))

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        rows = np.arange(X.shape[0])
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            f = self.feature[node]
            internal = f >= 0
            if not internal.any():
                return self.value[node]
            go_left = X[rows, np.where(internal, f, 0)] <= self.threshold[node]
            nxt = np.where(go_left, self.left[node], self.right[node])
            node = np.where(internal, nxt, node)


@dataclass(frozen=True)
class Forest:
    trees: tuple
    n_features: int

    def predict(self, X) -> np.ndarray:
        return np.mean([t.predict(X) for t in self.trees], axis=0)


def tree_seeds(seed: int, n_trees: int) -> np.ndarray:
    """Per-tree seeds derived from the root seed by tree counter."""
    return np.array([np.random.SeedSequence([seed, b]).generate_state(1)[0] for b in range(n_trees)],
                    dtype=np.uint32)


def fit_forest(X, y, cfg: ForestConfig = ForestConfig()) -> Forest:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n, F = X.shape
    if y.shape != (n,):
        raise ValueError("y must have one target per row")
    if n < cfg.min_samples_split:
        raise DegenerateData(f"{n} samples < min_samples_split={cfg.min_samples_split}")
    cap = 2 * n - 1
    if cfg.max_depth < 30:
        cap = min(cap, 2 ** (cfg.max_depth + 1) - 1)
    out = _grow_forest(X, y, tree_seeds(cfg.seed, cfg.n_trees).astype(np.int64), cfg.bootstrap,
                       cfg.max_depth, cfg.min_samples_split, cfg.n_split_features(F), cap)
    *arrays, n_nodes = out
    trees = tuple(Tree(*(a[b, :n_nodes[b]].copy() for a in arrays)) for b in range(cfg.n_trees))
    return Forest(trees, F)


def mdi_importance(forest: Forest, weighted: bool = False, normalize: bool = False) -> np.ndarray:
    """Sum of impurity reductions per split feature, averaged over trees.

    The default is the raw form: no sample-fraction weighting of node
    reductions and no normalisation. ``weighted``/``normalize`` give the
    conventional variant.
    """
    mdi = np.zeros(forest.n_features)
    for t in forest.trees:
        internal = t.feature >= 0
        d = t.delta[internal]
        if weighted:
            d = d * t.n_samples[internal] / t.n_samples[0]
        np.add.at(mdi, t.feature[internal], d)
    mdi /= len(forest.trees)
    if normalize and mdi.sum() > 0:
        mdi /= mdi.sum()
    return mdi
