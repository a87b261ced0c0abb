"""Gradient-descent linear weights used as a feature-importance vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Diverged


@dataclass(frozen=True)
class GdConfig:
    learning_rate: float = 0.01
    iterations: int = 100
    normalize_gradient: bool = True
    theta0: tuple | None = None  # None -> zeros
    divergence_factor: float = 1e6

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def gd_step(X, y, theta, learning_rate, normalize_gradient=True):
    """One update: theta - alpha * 2 X^T (X theta - y) [/ N]."""
    err = X @ theta - y
    grad = 2.0 * (X.T @ err)
    if normalize_gradient:
        grad = grad / X.shape[0]
    return theta - learning_rate * grad


def gd_fit(X, y, cfg: GdConfig = GdConfig()) -> np.ndarray:
    """Run the fixed-step descent and return the final weights.

    Raises Diverged once ``||theta||`` exceeds
    ``divergence_factor * (1 + ||theta0||)`` or turns non-finite.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, F = X.shape
    if n < 1 or y.shape != (n,):
        raise ValueError("need N >= 1 rows and one target per row")
    theta = np.zeros(F) if cfg.theta0 is None else np.array(cfg.theta0, dtype=np.float64)
    if theta.shape != (F,):
        raise ValueError(f"theta0 must have length {F}")
    limit = cfg.divergence_factor * (1.0 + np.linalg.norm(theta))
    for _ in range(cfg.iterations):
        theta = gd_step(X, y, theta, cfg.learning_rate, cfg.normalize_gradient)
        norm = np.linalg.norm(theta)
        if not norm <= limit:
            raise Diverged(f"|theta|={norm:.3g} exceeded {limit:.3g} at alpha={cfg.learning_rate}")
    return theta
