"""Brute-force reference computations, kept independent of the production paths.

``run_all`` compares production routines against them and is what the
``tickcast oracle`` command prints.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import mpmath
import numpy as np


def silhouette_direct(points, labels) -> list[float]:
    """Per-point silhouettes by explicit double loops (singletons -> 0, 0/0 -> 0)."""
    pts = [tuple(map(float, p)) for p in np.atleast_2d(np.asarray(points, dtype=float).reshape(len(labels), -1))]
    labels = [int(l) for l in labels]
    clusters = sorted(set(labels))
    out = []
    for i, p in enumerate(pts):
        own = [j for j, l in enumerate(labels) if l == labels[i] and j != i]
        if not own:
            out.append(0.0)
            continue
        a = sum(math.dist(p, pts[j]) for j in own) / len(own)
        b = min(
            sum(math.dist(p, pts[j]) for j, l in enumerate(labels) if l == c)
            / sum(1 for l in labels if l == c)
            for c in clusters if c != labels[i]
        )
        den = max(a, b)
        out.append((b - a) / den if den > 0 else 0.0)
    return out


def impurity(ys) -> float:
    m = sum(ys) / len(ys)
    return sum((v - m) ** 2 for v in ys) / len(ys)


def best_split_bruteforce(X, y):
    """Exhaustive (feature, midpoint threshold) search maximising the impurity reduction.

    Returns ``(feature, threshold, gain)`` or ``None`` when no split has
    positive gain. Ties resolve to the lowest feature, then lowest threshold.
    """
    X = np.asarray(X, dtype=float)
    y = [float(v) for v in y]
    n, F = X.shape
    parent = impurity(y)
    best = None
    for f in range(F):
        vals = sorted(set(X[:, f].tolist()))
        for lo, hi in zip(vals, vals[1:]):
            thr = (lo + hi) / 2
            if not thr < hi:
                thr = lo
            left = [y[i] for i in range(n) if X[i, f] <= thr]
            right = [y[i] for i in range(n) if X[i, f] > thr]
            gain = parent - len(left) / n * impurity(left) - len(right) / n * impurity(right)
            if best is None or gain > best[2] + 1e-12 * parent:
                best = (f, thr, gain)
    if best is None or best[2] <= 1e-12 * parent:
        return None
    return best


def tree_bruteforce(X, y, max_depth: int, min_split: int = 2):
    """Preorder list of ``(depth, feature, threshold, gain)`` for a greedily grown tree."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    out = []

    def grow(idx, depth):
        if depth >= max_depth or len(idx) < min_split or impurity(y[idx].tolist()) <= 0:
            return
        split = best_split_bruteforce(X[idx], y[idx])
        if split is None:
            return
        f, thr, gain = split
        out.append((depth, f, thr, gain))
        grow(idx[X[idx, f] <= thr], depth + 1)
        grow(idx[X[idx, f] > thr], depth + 1)

    grow(np.arange(len(y)), 0)
    return out


def tree_preorder(tree):
    """Same preorder listing read off a fitted production tree."""
    out = []

    def walk(j, depth):
        f = int(tree.feature[j])
        if f < 0:
            return
        out.append((depth, f, float(tree.threshold[j]), float(tree.delta[j])))
        walk(int(tree.left[j]), depth + 1)
        walk(int(tree.right[j]), depth + 1)

    walk(0, 0)
    return out


def kmeans_exhaustive(points, K: int) -> tuple[float, tuple]:
    """Global minimum within-cluster sum of squares over all partitions into K non-empty groups."""
    P = np.asarray(points, dtype=float)
    n = P.shape[0]
    best = (math.inf, None)
    # fix point 0 in group 0 to skip label permutations
    for rest in itertools.product(range(K), repeat=n - 1):
        labels = (0, *rest)
        if len(set(labels)) != K:
            continue
        lab = np.array(labels)
        total = 0.0
        for k in range(K):
            G = P[lab == k]
            total += float(((G - G.mean(axis=0)) ** 2).sum())
        if total < best[0]:
            best = (total, labels)
    return best


def normal_equations_mp(A, y, ridge: float = 0.0, dps: int = 50) -> np.ndarray:
    """``(A^T A + ridge I)^-1 A^T y`` in mpmath at ``dps`` digits."""
    with mpmath.workdps(dps):
        Am = mpmath.matrix(np.asarray(A, dtype=float).tolist())
        ym = mpmath.matrix(np.asarray(y, dtype=float).tolist())
        M = Am.T * Am
        if ridge:
            M += mpmath.mpf(ridge) * mpmath.eye(M.rows)
        w = mpmath.lu_solve(M, Am.T * ym)
        return np.array([float(v) for v in w])


def correlation_extended(X) -> np.ndarray:
    """Pearson correlation straight from the definition in long double."""
    X = np.asarray(X, dtype=np.longdouble)
    n, F = X.shape
    out = np.empty((F, F))
    for m in range(F):
        for k in range(F):
            a = X[:, m] - X[:, m].sum() / n
            b = X[:, k] - X[:, k].sum() / n
            out[m, k] = float((a * b).sum() / np.sqrt((a * a).sum() * (b * b).sum()))
    return out


def least_squares(X, y) -> np.ndarray:
    return np.linalg.lstsq(np.asarray(X, dtype=float), np.asarray(y, dtype=float), rcond=None)[0]


@dataclass(frozen=True)
class OracleResult:
    name: str
    passed: bool
    detail: str


def check_silhouette(trials=100, seed=0) -> OracleResult:
    from .cluster import silhouette

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(5, 30))
        K = int(rng.integers(2, min(6, n - 1) + 1))
        P = rng.normal(size=(n, int(rng.integers(1, 5))))
        labels = np.concatenate([np.arange(K), rng.integers(0, K, n - K)])
        rng.shuffle(labels)
        got = silhouette(P, labels)
        worst = max(worst, float(np.max(np.abs(got - silhouette_direct(P, labels)))))
    return OracleResult("silhouette vs direct O(n^2)", worst <= 1e-12, f"max abs diff {worst:.2e} (tol 1e-12)")


def check_solve_weights(trials=100, seed=0) -> OracleResult:
    from .rbf import solve_weights

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        A = rng.normal(size=(30, 4))
        y = rng.normal(size=30)
        w = solve_weights(A, y, 0.0)
        ref = normal_equations_mp(A, y)
        worst = max(worst, float(np.linalg.norm(w - ref) / np.linalg.norm(ref)))
    return OracleResult("solve_weights vs mp normal equations", worst <= 1e-8, f"max rel err {worst:.2e} (tol 1e-8)")


def check_forest_split(trials=100, seed=0) -> OracleResult:
    from .forest import ForestConfig, fit_forest

    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        n = int(rng.integers(4, 17))
        F = int(rng.integers(1, 4))
        X = rng.integers(0, 6, size=(n, F)).astype(float) if rng.random() < 0.5 else rng.normal(size=(n, F))
        y = rng.normal(size=n)
        cfg = ForestConfig(n_trees=1, max_depth=3, min_samples_split=2, feature_subsample=F, bootstrap=False)
        got = tree_preorder(fit_forest(X, y, cfg).trees[0])
        ref = tree_bruteforce(X, y, 3, 2)
        same = len(got) == len(ref) and all(
            g[0] == r[0] and g[1] == r[1] and g[2] == r[2] and abs(g[3] - r[3]) <= 1e-12
            for g, r in zip(got, ref))
        bad += not same
    return OracleResult("forest splits vs exhaustive enumeration", bad == 0, f"{bad}/{trials} trees differ")


def check_kmeans(trials=100, seed=0) -> OracleResult:
    from .cluster import kmeans

    rng = np.random.default_rng(seed)
    hits = 0
    worst_gap = 0.0
    for trial in range(trials):
        n = int(rng.integers(5, 9))
        K = int(rng.integers(2, 4))
        P = rng.normal(size=(n, 2))
        opt, _ = kmeans_exhaustive(P, K)
        got = kmeans(P, K, seed=trial, n_init=20).inertia
        gap = got - opt
        worst_gap = max(worst_gap, gap)
        hits += abs(gap) <= 1e-9
    ok = hits >= 0.95 * trials and worst_gap >= -1e-9
    return OracleResult("k-means best-of-20 vs exhaustive partitions", ok,
                        f"{hits}/{trials} at global optimum (need >= 95%)")


def run_all(trials: int = 100, seed: int = 0) -> list[OracleResult]:
    return [
        check_silhouette(trials, seed),
        check_solve_weights(trials, seed),
        check_forest_split(trials, seed),
        check_kmeans(trials, seed),
    ]
