"""k-means, silhouette coefficients and silhouette-quality driven choice of K."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import BadK, TooFewClusters, TooFewFeatures

# sd of silhouettes at or below this counts as zero variance
_DEGENERATE_SD = 1e-12


@dataclass(frozen=True)
class Clustering:
    K: int
    assignment: np.ndarray
    centroids: np.ndarray
    inertia: float
    n_iter_run: int
    inertia_trace: np.ndarray


@dataclass(frozen=True)
class SilhouetteReport:
    s: np.ndarray
    mean_s: float
    var_s: float
    q: float
    degenerate: bool


@dataclass(frozen=True)
class ClusterSearchConfig:
    max_clusters: int | None = None  # None -> min(n - 1, 10)
    n_init: int = 10
    kmeans_max_iter: int = 100
    tol: float = 1e-8
    seed: int = 0
    kmeans_plus_plus: bool = False

    def __post_init__(self):
        if self.max_clusters is not None and self.max_clusters < 2:
            raise ValueError("max_clusters must be >= 2")
        if self.n_init < 1 or self.kmeans_max_iter < 1:
            raise ValueError("n_init and kmeans_max_iter must be >= 1")


@dataclass(frozen=True)
class ClusterSelection:
    k: int
    clustering: Clustering
    silhouette: SilhouetteReport
    order: np.ndarray
    reordered: np.ndarray
    q_grid: np.ndarray  # (n_init, n_candidates), K = 2 + column


@numba.njit(cache=True, nogil=True)
def _assign(P, C, labels, d2):
    n, D = P.shape
    K = C.shape[0]
    for i in range(n):
        best = np.inf
        bk = 0
        for k in range(K):
            s = 0.0
            for j in range(D):
                t = P[i, j] - C[k, j]
                s += t * t
            d2[i, k] = s
            if s < best:
                best = s
                bk = k
        labels[i] = bk


@numba.njit(cache=True, nogil=True)
def _lloyd(P, C0, max_iter, tol):
    n, D = P.shape
    K = C0.shape[0]
    C = C0.copy()
    labels = np.full(n, -1, np.int64)
    prev_labels = np.full(n, -1, np.int64)
    d2 = np.empty((n, K))
    counts = np.zeros(K, np.int64)
    trace = np.empty(max_iter)
    it = 0
    while it < max_iter:
        _assign(P, C, labels, d2)
        counts[:] = 0
        for i in range(n):
            counts[labels[i]] += 1
        # empty cluster: move in the point farthest from its own centroid
        for k in range(K):
            if counts[k] == 0:
                far = -1
                fd = -1.0
                for i in range(n):
                    if counts[labels[i]] > 1 and d2[i, labels[i]] > fd:
                        fd = d2[i, labels[i]]
                        far = i
                counts[labels[far]] -= 1
                labels[far] = k
                counts[k] = 1
                for j in range(D):
                    C[k, j] = P[far, j]
                d2[far, k] = 0.0
        C[:, :] = 0.0
        for i in range(n):
            for j in range(D):
                C[labels[i], j] += P[i, j]
        for k in range(K):
            for j in range(D):
                C[k, j] /= counts[k]
        inertia = 0.0
        for i in range(n):
            for j in range(D):
                t = P[i, j] - C[labels[i], j]
                inertia += t * t
        trace[it] = inertia
        it += 1
        same = True
        for i in range(n):
            if labels[i] != prev_labels[i]:
                same = False
                break
        if same:
            break
        if it > 1 and trace[it - 2] - inertia <= tol * trace[it - 2]:
            break
        prev_labels[:] = labels
    return labels, C, trace[:it].copy(), it


@numba.njit(cache=True, nogil=True)
def _init_random(P, K):
    return P[np.random.permutation(P.shape[0])[:K]].copy()


@numba.njit(cache=True, nogil=True)
def _init_pp(P, K):
    n, D = P.shape
    C = np.empty((K, D))
    C[0] = P[np.random.randint(0, n)]
    closest = np.empty(n)
    for i in range(n):
        closest[i] = np.sum((P[i] - C[0]) ** 2)
    for k in range(1, K):
        tot = closest.sum()
        if tot <= 0.0:
            pick = np.random.randint(0, n)
        else:
            r = np.random.random() * tot
            acc = 0.0
            pick = n - 1
            for i in range(n):
                acc += closest[i]
                if acc >= r:
                    pick = i
                    break
        C[k] = P[pick]
        for i in range(n):
            closest[i] = min(closest[i], np.sum((P[i] - C[k]) ** 2))
    return C


@numba.njit(cache=True, nogil=True)
def _kmeans_restarts(P, K, n_init, seed, max_iter, tol, pp):
    np.random.seed(seed)
    best_inertia = np.inf
    best_labels = np.zeros(P.shape[0], np.int64)
    best_C = np.zeros((K, P.shape[1]))
    best_trace = np.zeros(1)
    best_it = 0
    for r in range(n_init):
        C0 = _init_pp(P, K) if pp else _init_random(P, K)
        labels, C, trace, it = _lloyd(P, C0, max_iter, tol)
        if trace[-1] < best_inertia:
            best_inertia = trace[-1]
            best_labels = labels
            best_C = C
            best_trace = trace
            best_it = it
    return best_labels, best_C, best_trace, best_it


def _check_points(points, K):
    P = np.ascontiguousarray(points, dtype=np.float64)
    if P.ndim == 1:
        P = P[:, None]
    if not np.all(np.isfinite(P)):
        raise ValueError("points must be finite")
    if not 1 <= K <= P.shape[0]:
        raise BadK(f"K={K} outside [1, {P.shape[0]}]")
    return P


def kmeans(points, K: int, seed: int = 0, max_iter: int = 100, tol: float = 1e-8,
           n_init: int = 1, kmeans_plus_plus: bool = False) -> Clustering:
    """Lloyd's algorithm from uniformly drawn distinct points; best inertia over ``n_init`` starts."""
    P = _check_points(points, K)
    labels, C, trace, it = _kmeans_restarts(P, K, n_init, _numba_seed(seed), max_iter, tol, kmeans_plus_plus)
    return Clustering(K, labels, C, float(trace[-1]), int(it), trace)


def _numba_seed(seed) -> int:
    return int(np.random.SeedSequence(int(seed) & (2**63 - 1)).generate_state(1)[0])


@numba.njit(cache=True, nogil=True)
def _silhouette(Dm, labels, K):
    n = Dm.shape[0]
    counts = np.zeros(K, np.int64)
    for i in range(n):
        counts[labels[i]] += 1
    s = np.zeros(n)
    sums = np.zeros(K)
    for i in range(n):
        sums[:] = 0.0
        for j in range(n):
            if j != i:
                sums[labels[j]] += Dm[i, j]
        own = labels[i]
        if counts[own] < 2:
            continue
        a = sums[own] / (counts[own] - 1)
        b = np.inf
        for k in range(K):
            if k != own and counts[k] > 0:
                m = sums[k] / counts[k]
                if m < b:
                    b = m
        den = max(a, b)
        if den > 0.0 and np.isfinite(b):
            s[i] = (b - a) / den
    return s


@numba.njit(cache=True, nogil=True)
def _quality(s):
    mean = s.mean()
    var = np.mean((s - mean) ** 2)
    sd = np.sqrt(var)
    if sd <= _DEGENERATE_SD:
        return (np.inf if mean > 0 else -np.inf), mean, var, True
    return mean / sd, mean, var, False


def pairwise_distances(P) -> np.ndarray:
    P = np.asarray(P, dtype=np.float64)
    sq = np.sum((P[:, None, :] - P[None, :, :]) ** 2, axis=-1)
    return np.sqrt(sq)


def silhouette(points, clustering) -> np.ndarray:
    """Per-point silhouette coefficients (Euclidean); singletons and 0/0 give 0."""
    P = np.asarray(points, dtype=np.float64)
    if P.ndim == 1:
        P = P[:, None]
    labels = np.asarray(getattr(clustering, "assignment", clustering), dtype=np.int64)
    K = int(getattr(clustering, "K", labels.max() + 1))
    if K < 2:
        raise TooFewClusters("silhouette needs K >= 2")
    if P.shape[0] < 3:
        raise TooFewClusters("silhouette needs at least three points")
    return _silhouette(pairwise_distances(P), labels, K)


def quality(s) -> tuple[float, bool]:
    """Mean over (population) sd of the silhouettes, with infinite stand-ins when sd is zero."""
    s = np.asarray(s, dtype=np.float64)
    if s.size == 0:
        raise ValueError("empty silhouette vector")
    q, _, _, degenerate = _quality(s)
    return float(q), bool(degenerate)


def silhouette_report(points, clustering) -> SilhouetteReport:
    s = silhouette(points, clustering)
    q, mean, var, deg = _quality(s)
    return SilhouetteReport(s, float(mean), float(var), float(q), bool(deg))


@numba.njit(cache=True, nogil=True)
def _search(P, Dm, kmax, n_init, seed, max_iter, tol, pp):
    np.random.seed(seed)
    nk = kmax - 1
    qgrid = np.empty((n_init, nk))
    best_q = -np.inf
    best_k = -1
    best_labels = np.zeros(P.shape[0], np.int64)
    best_C = np.zeros((1, P.shape[1]))
    best_trace = np.zeros(1)
    best_it = 0
    for init in range(n_init):
        for K in range(2, kmax + 1):
            C0 = _init_pp(P, K) if pp else _init_random(P, K)
            labels, C, trace, it = _lloyd(P, C0, max_iter, tol)
            s = _silhouette(Dm, labels, K)
            q, mean, var, deg = _quality(s)
            qgrid[init, K - 2] = q
            if best_k < 0 or q > best_q or (q == best_q and K < best_k):
                best_q = q
                best_k = K
                best_labels = labels
                best_C = C
                best_trace = trace
                best_it = it
    return best_k, best_labels, best_C, best_trace, best_it, qgrid


def canonical_order(P) -> np.ndarray:
    """Row order determined by each row's sorted coordinates.

    Invariant to permuting rows and to permuting coordinates, so a
    simultaneously permuted distance matrix maps to the same sequence of
    points.
    """
    keys = np.sort(np.asarray(P), axis=1)
    return np.lexsort(keys.T[::-1])


def select_k(dist, cfg: ClusterSearchConfig = ClusterSearchConfig()) -> ClusterSelection:
    """Pick K in [2, max_clusters] maximising the silhouette quality ratio.

    Each row of the F x F distance matrix is one point. Ties go to the
    smaller K, then the earlier restart. Points are processed in a canonical
    order so the result does not depend on feature ordering.
    """
    C = np.asarray(getattr(dist, "c", dist), dtype=np.float64)
    F = C.shape[0]
    if C.ndim != 2 or C.shape[1] != F:
        raise ValueError("distance matrix must be square")
    if F < 3:
        raise TooFewFeatures(f"need at least 3 features, got {F}")
    kmax = min(F - 1, 10) if cfg.max_clusters is None else min(cfg.max_clusters, F - 1)

    perm = canonical_order(C)
    P = np.ascontiguousarray(C[perm])
    Dm = pairwise_distances(P)
    k, lab_p, cent, trace, it, qgrid = _search(P, Dm, kmax, cfg.n_init, _numba_seed(cfg.seed),
                                               cfg.kmeans_max_iter, cfg.tol, cfg.kmeans_plus_plus)
    labels = np.empty(F, dtype=np.int64)
    labels[perm] = lab_p
    # relabel clusters by first appearance in the original order
    _, first = np.unique(labels, return_index=True)
    rank = np.empty(k, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(k)
    centroids = np.empty_like(cent)
    centroids[rank] = cent
    labels = rank[labels]
    clustering = Clustering(k, labels, centroids, float(trace[-1]), int(it), trace)
    s = np.empty(F)
    s[perm] = _silhouette(Dm, lab_p, k)
    q, mean, var, deg = _quality(s)
    order = np.argsort(labels, kind="stable")
    return ClusterSelection(k, clustering, SilhouetteReport(s, float(mean), float(var), float(q), bool(deg)),
                            order, C[np.ix_(order, order)], qgrid)
