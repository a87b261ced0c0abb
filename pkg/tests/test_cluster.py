import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tickcast.cluster import ClusterSearchConfig, kmeans, quality, select_k, silhouette, silhouette_report
from tickcast.errors import BadK, TooFewClusters, TooFewFeatures
from tickcast.geometry import correlation_matrix, distance_matrix
from tickcast.oracles import kmeans_exhaustive, silhouette_direct

SQUARE = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])


def _same_partition(a, b):
    return len(set(zip(a.tolist(), b.tolist()))) == len(set(a.tolist())) == len(set(b.tolist()))


class TestKmeans:
    @pytest.mark.example
    def test_separated_pairs(self):
        for seed in range(5):
            c = kmeans(SQUARE, 2, seed=seed)
            assert c.inertia == pytest.approx(1.0, abs=1e-12)
            got = sorted(map(tuple, c.centroids.round(12)))
            assert got == [(0.0, 0.5), (10.0, 0.5)]

    @pytest.mark.example
    def test_k_equals_n(self):
        c = kmeans(SQUARE, 4, seed=1)
        assert c.inertia == 0.0
        assert sorted(c.assignment.tolist()) == [0, 1, 2, 3]

    @pytest.mark.example
    def test_global_optimum_six_points(self):
        P = np.random.default_rng(7).normal(size=(6, 2))
        opt, _ = kmeans_exhaustive(P, 2)
        assert kmeans(P, 2, seed=0, n_init=20).inertia == pytest.approx(opt, abs=1e-9)

    def test_bad_k(self):
        with pytest.raises(BadK):
            kmeans(SQUARE, 5)
        with pytest.raises(BadK):
            kmeans(SQUARE, 0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(1, 6))
    def test_invariants(self, seed, K):
        P = np.random.default_rng(seed).normal(size=(12, 3))
        c = kmeans(P, K, seed=seed, n_init=2)
        assert np.all(np.diff(c.inertia_trace) <= 1e-12 * (1 + c.inertia_trace[0]))
        assert set(c.assignment.tolist()) == set(range(K))
        manual = sum(np.sum((P[c.assignment == k] - c.centroids[k]) ** 2) for k in range(K))
        assert c.inertia == pytest.approx(manual, rel=1e-10, abs=1e-12)

    def test_empty_cluster_repair(self):
        P = np.array([[0.0], [0.0], [0.0], [1.0], [5.0]])
        for seed in range(20):
            assert set(kmeans(P, 3, seed=seed).assignment.tolist()) == {0, 1, 2}


class TestSilhouette:
    @pytest.mark.example
    def test_line_example(self):
        P = np.array([0.0, 0.1, 10.0, 10.1])
        s = silhouette(P, np.array([0, 0, 1, 1]))
        np.testing.assert_allclose(s, [(10.05 - 0.1) / 10.05, (9.95 - 0.1) / 9.95,
                                       (9.95 - 0.1) / 9.95, (10.05 - 0.1) / 10.05], atol=1e-12)
        assert s[0] == pytest.approx(0.99005, abs=1e-5)

    @pytest.mark.example
    def test_singleton_is_zero(self):
        assert silhouette(np.array([0.0, 1.0, 9.0]), np.array([0, 0, 1]))[2] == 0.0

    @pytest.mark.example
    def test_identical_points(self):
        np.testing.assert_array_equal(silhouette(np.zeros((4, 2)), np.array([0, 0, 1, 1])), 0.0)

    def test_preconditions(self):
        with pytest.raises(TooFewClusters):
            silhouette(SQUARE, np.zeros(4, dtype=int))
        with pytest.raises(TooFewClusters):
            silhouette(SQUARE[:2], np.array([0, 1]))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(2, 5))
    def test_matches_direct_evaluation(self, seed, K):
        rng = np.random.default_rng(seed)
        P = rng.normal(size=(15, 3))
        labels = rng.integers(0, K, 15)
        s = silhouette(P, labels)
        np.testing.assert_allclose(s, silhouette_direct(P, labels), atol=1e-12)
        assert np.all((s >= -1) & (s <= 1))


class TestQuality:
    @pytest.mark.example
    def test_ratio(self):
        q, deg = quality([0.8, 0.4])
        assert q == pytest.approx(3.0, abs=1e-12) and not deg

    @pytest.mark.example
    def test_degenerate_positive(self):
        assert quality([0.5, 0.5]) == (np.inf, True)

    @pytest.mark.example
    def test_degenerate_nonpositive(self):
        assert quality([0.0, 0.0, 0.0]) == (-np.inf, True)

    def test_population_variance(self):
        s = np.array([0.1, 0.2, 0.6])
        assert quality(s)[0] == pytest.approx(s.mean() / s.std(ddof=0))

    def test_report(self):
        r = silhouette_report(SQUARE, np.array([0, 0, 1, 1]))
        assert r.q == np.inf and r.degenerate and r.mean_s > 0.9


def _two_groups():
    c = np.full((4, 4), 0.95)
    c[:2, :2] = c[2:, 2:] = 0.02
    np.fill_diagonal(c, 0.0)
    return c


class TestSelectK:
    @pytest.mark.example
    def test_two_far_groups(self):
        sel = select_k(_two_groups(), ClusterSearchConfig(seed=3))
        assert sel.k == 2
        assert sel.clustering.assignment.tolist() == [0, 0, 1, 1]

    @pytest.mark.example
    def test_two_far_groups_exhaustive(self):
        # over every partition into 2 or 3 groups, the best q is a 2-partition
        P = _two_groups()
        best = {}
        for labels in itertools.product(range(3), repeat=4):
            K = len(set(labels))
            if K < 2 or sorted(set(labels)) != list(range(K)):
                continue
            q, _ = quality(silhouette(P, np.array(labels)))
            best[K] = max(best.get(K, -np.inf), q)
        assert best[2] > best[3]

    @pytest.mark.example
    def test_forced_k(self):
        D = distance_matrix(correlation_matrix(np.random.default_rng(0).normal(size=(30, 6)))).c
        assert select_k(D, ClusterSearchConfig(max_clusters=2)).k == 2

    @pytest.mark.example
    def test_four_features_gives_two_or_three(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            D = distance_matrix(correlation_matrix(rng.normal(size=(50, 4)))).c
            assert select_k(D, ClusterSearchConfig(seed=int(rng.integers(1000)))).k in (2, 3)

    def test_too_few_features(self):
        with pytest.raises(TooFewFeatures):
            select_k(np.zeros((2, 2)))

    def test_deterministic(self):
        D = distance_matrix(correlation_matrix(np.random.default_rng(4).normal(size=(40, 9)))).c
        a, b = select_k(D, ClusterSearchConfig(seed=5)), select_k(D, ClusterSearchConfig(seed=5))
        assert a.k == b.k
        np.testing.assert_array_equal(a.clustering.assignment, b.clustering.assignment)
        np.testing.assert_array_equal(a.q_grid, b.q_grid)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        D = distance_matrix(correlation_matrix(rng.normal(size=(40, 8)))).c
        perm = rng.permutation(8)
        a = select_k(D, ClusterSearchConfig(seed=2))
        b = select_k(D[np.ix_(perm, perm)], ClusterSearchConfig(seed=2))
        assert a.k == b.k
        assert _same_partition(a.clustering.assignment[perm], b.clustering.assignment)
        assert b.silhouette.q == pytest.approx(a.silhouette.q, abs=1e-12, rel=1e-12) or a.silhouette.q == b.silhouette.q

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_reorder_is_symmetric_permutation(self, seed):
        D = distance_matrix(correlation_matrix(np.random.default_rng(seed).normal(size=(30, 7)))).c
        sel = select_k(D)
        np.testing.assert_array_equal(np.sort(sel.reordered, axis=None), np.sort(D, axis=None))
        np.testing.assert_array_equal(sel.reordered, sel.reordered.T)
        assert sorted(sel.order.tolist()) == list(range(7))
        assert np.all(np.diff(sel.clustering.assignment[sel.order]) >= 0)
