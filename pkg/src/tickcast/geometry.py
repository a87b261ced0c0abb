"""Importance weighting and correlation-distance matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, TooFewRows


@dataclass(frozen=True)
class ImportanceVector:
    weights: np.ndarray
    source: str  # "MDI" or "GD"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or not np.all(np.isfinite(w)):
            raise ValueError("importance weights must be a finite 1-d vector")
        if self.source == "MDI" and np.any(w < 0):
            raise ValueError("MDI importances are non-negative")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class WeightedMatrix:
    values: np.ndarray
    source: str = ""


@dataclass(frozen=True)
class CorrMatrix:
    rho: np.ndarray
    # 1 - rho evaluated without cancellation; None when only rho is known
    complement: np.ndarray | None = None


@dataclass(frozen=True)
class DistanceMatrix:
    c: np.ndarray


def _weights(w):
    return w.weights if isinstance(w, ImportanceVector) else np.asarray(w, dtype=np.float64)


def apply_importance(X, w) -> WeightedMatrix:
    values = getattr(X, "values", X)
    values = np.asarray(values, dtype=np.float64)
    weights = _weights(w)
    if values.ndim != 2 or weights.shape != (values.shape[1],):
        raise DimensionMismatch(f"{values.shape} matrix with {weights.shape} weights")
    return WeightedMatrix(values * weights, getattr(w, "source", ""))


def correlation_matrix(FI) -> CorrMatrix:
    """Pearson correlation of columns, two-pass.

    Zero-variance columns correlate 0 with everything else and 1 with
    themselves. Alongside rho, ``1 - rho`` is kept in the form
    ``|u_m - u_n|^2 / 2`` over unit-norm centred columns, which stays
    accurate for nearly collinear pairs where ``1 - rho`` cancels.
    """
    X = np.asarray(getattr(FI, "values", FI), dtype=np.float64)
    n, F = X.shape
    if n < 2:
        raise TooFewRows("correlation needs at least two rows")
    D = X - X.mean(axis=0)
    ss = np.einsum("ij,ij->j", D, D)
    scale = np.abs(X).max(axis=0)
    dead = ss <= (1e-13 * scale) ** 2 * n
    norm = np.sqrt(np.where(dead, 1.0, ss))
    rho = (D.T @ D) / np.outer(norm, norm)
    rho[dead, :] = 0.0
    rho[:, dead] = 0.0
    rho = np.clip(0.5 * (rho + rho.T), -1.0, 1.0)
    np.fill_diagonal(rho, 1.0)
    U = D / norm
    diff = U[:, :, None] - U[:, None, :]
    comp = 0.5 * np.einsum("imn,imn->mn", diff, diff)
    comp[dead, :] = 1.0
    comp[:, dead] = 1.0
    comp = np.clip(0.5 * (comp + comp.T), 0.0, 2.0)
    np.fill_diagonal(comp, 0.0)
    return CorrMatrix(rho, comp)


def distance_matrix(rho) -> DistanceMatrix:
    """c = sqrt((1 - rho) / 2), using the cancellation-free complement when available."""
    comp = getattr(rho, "complement", None)
    if comp is None:
        comp = 1.0 - np.asarray(getattr(rho, "rho", rho), dtype=np.float64)
    c = np.sqrt(np.clip(0.5 * comp, 0.0, 1.0))
    return DistanceMatrix(c)
