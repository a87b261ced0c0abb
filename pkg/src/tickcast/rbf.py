"""Gaussian RBF network: k-means centres, shared spread, least-squares output layer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cluster import kmeans
from .errors import DimensionMismatch, SingleCentroid, SingularSystem


@dataclass(frozen=True)
class RbfModel:
    centroids: np.ndarray
    sigma: float
    weights: np.ndarray
    ridge: float
    shift: np.ndarray  # inputs are mapped to (x - shift) * mult before the hidden layer
    mult: np.ndarray
    target_offset: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.centroids.shape[0] < 2:
            raise SingleCentroid("an RBF model needs at least two centroids")
        if not np.all(np.isfinite(self.centroids)):
            raise ValueError("centroids must be finite")

    @property
    def K(self) -> int:
        return self.centroids.shape[0]

    def transform(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.shift.shape[0]:
            raise DimensionMismatch(f"model expects {self.shift.shape[0]} columns, got {X.shape[1]}")
        return (X - self.shift) * self.mult


def spread(centroids) -> float:
    """Mean pairwise distance between distinct centres, floored away from zero."""
    C = np.asarray(centroids, dtype=np.float64)
    K = C.shape[0]
    if K < 2:
        raise SingleCentroid("spread needs K >= 2")
    diff = C[:, None, :] - C[None, :, :]
    total = np.sqrt(np.sum(diff * diff, axis=-1)).sum()
    sigma = total / (K * (K - 1))
    floor = 1e-9 * (1.0 + np.mean(np.linalg.norm(C, axis=1)))
    return float(max(sigma, floor))


def activations(X, centroids, sigma: float) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    C = np.asarray(centroids, dtype=np.float64)
    diff = X[:, None, :] - C[None, :, :]
    d2 = np.einsum("ikf,ikf->ik", diff, diff)
    return np.exp(-d2 / (2.0 * sigma * sigma))


def default_ridge(A) -> float:
    K = A.shape[1]
    return 1e-8 * float(np.einsum("ij,ij->", A, A)) / K


def solve_weights(A, y, ridge: float | None = None) -> np.ndarray:
    """Least-squares output weights ``(A^T A + ridge I)^-1 A^T y``.

    Solved by QR of the ridge-augmented system rather than by forming the
    inverse. ``ridge=None`` uses ``1e-8 * trace(A^T A) / K``; ``ridge=0``
    gives the plain normal-equation solution and raises SingularSystem if
    ``A`` is numerically rank deficient.
    """
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    N, K = A.shape
    if ridge is None:
        ridge = default_ridge(A)
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    if ridge > 0:
        A_aug = np.vstack([A, np.sqrt(ridge) * np.eye(K)])
        y_aug = np.concatenate([y, np.zeros(K)])
    else:
        if N < K:
            raise SingularSystem(f"{N} rows cannot determine {K} weights")
        A_aug, y_aug = A, y
    Q, R = np.linalg.qr(A_aug, mode="reduced")
    diag = np.abs(np.diag(R))
    if ridge == 0 and (diag.size == 0 or diag.min() <= max(N, K) * np.finfo(float).eps * diag.max()):
        raise SingularSystem("A^T A is numerically singular")
    return scipy.linalg.solve_triangular(R, Q.T @ y_aug)


def predict(model: RbfModel, X) -> np.ndarray:
    A = activations(model.transform(X), model.centroids, model.sigma)
    return A @ model.weights + model.target_offset


def fit_rbfnn(X, y, K: int, seed: int = 0, *, ridge: float | None = None, n_init: int = 10,
              shift=None, mult=None, target_offset: float = 0.0,
              max_iter: int = 100, tol: float = 1e-8) -> RbfModel:
    """Fit centres by k-means on the (transformed) rows, then solve the output layer.

    ``shift``/``mult`` define the input map applied before the hidden layer
    and are stored on the model; ``target_offset`` is subtracted from the
    targets before the solve and added back by ``predict``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    N, F = X.shape
    if K < 2:
        raise SingleCentroid("K must be >= 2")
    if N < K:
        raise ValueError(f"need N >= K, got N={N}, K={K}")
    shift = np.zeros(F) if shift is None else np.asarray(shift, dtype=np.float64)
    mult = np.ones(F) if mult is None else np.asarray(mult, dtype=np.float64)
    Z = (X - shift) * mult
    cl = kmeans(Z, K, seed=seed, n_init=n_init, max_iter=max_iter, tol=tol)
    sigma = spread(cl.centroids)
    A = activations(Z, cl.centroids, sigma)
    lam = default_ridge(A) if ridge is None else ridge
    w = solve_weights(A, y - target_offset, lam)
    return RbfModel(cl.centroids, sigma, w, lam, shift, mult, float(target_offset))


def with_centroids(X, y, centroids, *, ridge: float | None = None, shift=None, mult=None) -> RbfModel:
    """Output-layer fit for fixed centres (no clustering step)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    F = X.shape[1]
    shift = np.zeros(F) if shift is None else np.asarray(shift, dtype=np.float64)
    mult = np.ones(F) if mult is None else np.asarray(mult, dtype=np.float64)
    C = np.asarray(centroids, dtype=np.float64)
    sigma = spread(C)
    A = activations((X - shift) * mult, C, sigma)
    lam = default_ridge(A) if ridge is None else ridge
    return RbfModel(C, sigma, solve_weights(A, y, lam), lam, shift, mult)
