import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tickcast.errors import DimensionMismatch, SingleCentroid, SingularSystem
from tickcast.oracles import normal_equations_mp
from tickcast.rbf import RbfModel, activations, fit_rbfnn, predict, solve_weights, spread, with_centroids

CENTERS = np.array([[-2.0, 0.0], [2.0, 1.0]])


def symmetric_mixture(w=(1.5, -0.7), per=10, radius=0.3):
    """Point clouds symmetric about two known centres; targets from the exact network."""
    ang = 2 * np.pi * np.arange(per) / per
    ring = radius * np.column_stack([np.cos(ang), np.sin(ang)])
    X = np.vstack([c + ring for c in CENTERS])
    y = activations(X, CENTERS, spread(CENTERS)) @ np.asarray(w)
    return X, y


class TestSpread:
    @pytest.mark.example
    def test_pair(self):
        assert spread([[0.0, 0.0], [3.0, 0.0]]) == pytest.approx(3.0, abs=1e-15)

    @pytest.mark.example
    def test_equilateral(self):
        tri = [[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]]
        assert spread(tri) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.example
    def test_coincident_floor(self):
        assert spread([[3.0, 4.0], [3.0, 4.0]]) == pytest.approx(1e-9 * 6.0)

    def test_single(self):
        with pytest.raises(SingleCentroid):
            spread([[1.0, 2.0]])


class TestActivations:
    @pytest.mark.example
    def test_values(self):
        s = 0.7
        A = activations([[0.0, 0.0], [s, s], [1e4, 0.0]], [[0.0, 0.0]], s)
        assert A[0, 0] == 1.0
        assert A[1, 0] == pytest.approx(np.exp(-1), abs=1e-15)
        assert A[2, 0] == 0.0 and np.isfinite(A[2, 0])

    @given(st.integers(0, 2**31 - 1))
    def test_range(self, seed):
        rng = np.random.default_rng(seed)
        X, C, sigma = rng.normal(size=(10, 3)), rng.normal(size=(4, 3)), rng.uniform(0.1, 3)
        A = activations(X, C, sigma)
        assert np.all(np.isfinite(A)) and np.all((A >= 0) & (A <= 1))
        representable = np.sum((X[:, None] - C[None]) ** 2, axis=-1) / (2 * sigma**2) < 700
        assert np.all(A[representable] > 0)


class TestSolve:
    @pytest.mark.example
    def test_identity(self):
        y = np.array([1.0, -2.0, 3.5])
        np.testing.assert_allclose(solve_weights(np.eye(3), y, ridge=0.0), y, atol=1e-15)
        np.testing.assert_allclose(solve_weights(np.eye(3), y, ridge=1e-14), y, atol=1e-12)

    @pytest.mark.example
    def test_orthonormal(self):
        Q, _ = np.linalg.qr(np.random.default_rng(0).normal(size=(8, 3)))
        y = np.arange(8.0)
        np.testing.assert_allclose(solve_weights(Q, y, ridge=0.0), Q.T @ y, atol=1e-12)

    @pytest.mark.example
    def test_against_extended_precision(self):
        rng = np.random.default_rng(3)
        A, y = rng.normal(size=(30, 4)), rng.normal(size=30)
        for lam in (0.0, 1e-3):
            want = normal_equations_mp(A, y, ridge=lam)
            np.testing.assert_allclose(solve_weights(A, y, ridge=lam), want, rtol=1e-8)

    def test_singular(self):
        A = np.column_stack([np.ones(5), np.ones(5)])
        with pytest.raises(SingularSystem):
            solve_weights(A, np.ones(5), ridge=0.0)
        assert np.all(np.isfinite(solve_weights(A, np.ones(5))))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_first_order_optimality(self, seed):
        rng = np.random.default_rng(seed)
        A, y = rng.uniform(0, 1, size=(25, 4)), rng.normal(size=25)
        r = A @ solve_weights(A, y, ridge=0.0) - y
        assert np.linalg.norm(A.T @ r) <= 1e-6 * np.linalg.norm(A) * np.linalg.norm(y)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.floats(1e-6, 10.0))
    def test_no_ridge_fits_at_least_as_well(self, seed, lam):
        rng = np.random.default_rng(seed)
        A, y = rng.uniform(0, 1, size=(25, 4)), rng.normal(size=25)
        mse = lambda w: np.mean((A @ w - y) ** 2)  # noqa: E731
        assert mse(solve_weights(A, y, 0.0)) <= mse(solve_weights(A, y, lam)) + 1e-15


class TestPredict:
    def _model(self, w):
        return RbfModel(CENTERS, 1.0, np.asarray(w, float), 0.0, np.zeros(2), np.ones(2))

    @pytest.mark.example
    def test_zero_weights(self):
        np.testing.assert_array_equal(predict(self._model([0, 0]), np.ones((3, 2))), 0.0)

    @pytest.mark.example
    def test_at_centre_far_from_other(self):
        m = RbfModel(np.array([[0.0], [100.0]]), 1.0, np.array([2.5, -4.0]), 0.0, np.zeros(1), np.ones(1))
        assert predict(m, [[0.0]])[0] == pytest.approx(2.5, abs=1e-12)

    @pytest.mark.example
    def test_composition(self):
        X, y = symmetric_mixture()
        m = with_centroids(X, y, CENTERS, ridge=0.0)
        np.testing.assert_array_equal(predict(m, X), activations(X, m.centroids, m.sigma) @ m.weights)

    def test_single_centroid_model_rejected(self):
        with pytest.raises(SingleCentroid):
            RbfModel(np.zeros((1, 2)), 1.0, np.ones(1), 0.0, np.zeros(2), np.ones(2))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            predict(self._model([1, 1]), np.ones((2, 3)))

    def test_transform_and_offset(self):
        X, y = symmetric_mixture()
        m = fit_rbfnn(X * 2 + 5, y + 100.0, 2, shift=np.full(2, 5.0), mult=np.full(2, 0.5), target_offset=100.0)
        np.testing.assert_allclose(predict(m, X * 2 + 5), y + 100.0, atol=1e-6)


class TestFit:
    @pytest.mark.example
    def test_noiseless_mixture(self):
        X, y = symmetric_mixture()
        m = fit_rbfnn(X, y, 2, seed=1)
        np.testing.assert_allclose(np.sort(m.centroids, axis=0), np.sort(CENTERS, axis=0), atol=1e-12)
        assert np.sqrt(np.mean((predict(m, X) - y) ** 2)) <= 1e-6

    @pytest.mark.example
    def test_interpolation(self):
        rng = np.random.default_rng(2)
        X, y = rng.normal(size=(5, 3)), rng.normal(size=5)
        m = fit_rbfnn(X, y, 5, seed=0, ridge=0.0)
        assert m.centroids.shape == (5, 3)
        assert np.sqrt(np.mean((predict(m, X) - y) ** 2)) <= 1e-6

    @pytest.mark.example
    def test_constant_targets(self):
        rng = np.random.default_rng(8)
        X, y = rng.normal(size=(40, 2)), np.full(40, 3.0)
        m = fit_rbfnn(X, y, 3, seed=0, ridge=0.0)
        A = activations(X, m.centroids, m.sigma)
        assert np.linalg.norm(A.T @ (predict(m, X) - y)) <= 1e-6 * np.linalg.norm(y)

    def test_deterministic(self):
        X = np.random.default_rng(9).normal(size=(50, 3))
        y = X[:, 0]
        a, b = fit_rbfnn(X, y, 4, seed=3), fit_rbfnn(X, y, 4, seed=3)
        np.testing.assert_array_equal(a.weights, b.weights)
        np.testing.assert_array_equal(a.centroids, b.centroids)

    def test_preconditions(self):
        with pytest.raises(SingleCentroid):
            fit_rbfnn(np.ones((4, 2)), np.ones(4), 1)
        with pytest.raises(ValueError):
            fit_rbfnn(np.ones((2, 2)), np.ones(2), 3)
