import numpy as np
import pytest

from graphlens import KnnGraph, build_knn, build_manifold, smooth_weights
from graphlens.errors import EmptyDataset, KOutOfRange, NonFiniteInput
from graphlens.manifold import metric_transform, pairwise_distance

from oracles import knn_oracle, metric_value, sigma_oracle


class TestMetrics:
    @pytest.mark.parametrize("metric", ["euclidean", "cosine", "correlation"])
    def test_self_distance_zero_and_symmetry(self, metric):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(10, 6))
        d = pairwise_distance(x, x, metric)
        assert np.allclose(np.diag(d), 0.0, atol=1e-12)
        assert np.allclose(d, d.T, atol=1e-12)

    @pytest.mark.parametrize("metric", ["cosine", "correlation"])
    def test_bounded_metrics(self, metric):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(30, 4))
        d = pairwise_distance(x, x, metric)
        assert d.min() >= 0.0
        assert d.max() <= 2.0

    @pytest.mark.parametrize("metric", ["euclidean", "cosine", "correlation"])
    def test_matches_textbook_formulas(self, metric):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(12, 5))
        d = pairwise_distance(x, x, metric)
        for i in range(12):
            for j in range(12):
                assert d[i, j] == pytest.approx(
                    metric_value(x[i], x[j], metric), abs=1e-10
                )

    def test_unknown_metric_rejected(self):
        with pytest.raises(ValueError):
            metric_transform(np.zeros((2, 2)), "manhattan")


class TestBuildKnn:
    def test_collinear_points(self):
        x = np.array([[0.0], [1.0], [3.0]])
        knn = build_knn(x, 1, "euclidean")
        assert list(knn.indices[:, 0]) == [1, 0, 1]

    def test_full_k_lists_everyone(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(9, 3))
        knn = build_knn(x, 8, "euclidean")
        for i in range(9):
            assert set(knn.indices[i]) == set(range(9)) - {i}

    @pytest.mark.parametrize("metric", ["euclidean", "cosine", "correlation"])
    def test_matches_exhaustive_oracle(self, metric):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(40, 5))
        knn = build_knn(x, 6, metric)
        oracle_idx, oracle_dst = knn_oracle(x, 6, metric)
        assert np.array_equal(knn.indices, oracle_idx)
        assert np.allclose(knn.distances, oracle_dst, atol=1e-9)

    def test_distances_sorted_and_no_self(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(50, 4))
        knn = build_knn(x, 10, "cosine")
        assert np.all(np.diff(knn.distances, axis=1) >= 0)
        assert not np.any(knn.indices == np.arange(50)[:, None])

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=(30, 4))
        perm = rng.permutation(30)
        knn = build_knn(x, 5, "euclidean")
        knn_p = build_knn(x[perm], 5, "euclidean")
        inverse = np.argsort(perm)
        for row in range(30):
            mapped = sorted(inverse[knn.indices[perm[row]]])
            assert mapped == sorted(knn_p.indices[row])

    def test_errors(self):
        with pytest.raises(EmptyDataset):
            build_knn(np.zeros((1, 2)), 1)
        with pytest.raises(KOutOfRange):
            build_knn(np.zeros((5, 2)), 5)
        with pytest.raises(KOutOfRange):
            build_knn(np.zeros((5, 2)), 0)
        bad = np.ones((5, 2))
        bad[0, 0] = np.nan
        with pytest.raises(NonFiniteInput):
            build_knn(bad, 2)

    def test_approximate_backend_close_to_exact(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(1200, 6))
        exact = build_knn(x, 10)
        approx = build_knn(x, 10, exact_threshold=500, seed=1)
        assert exact.exact and not approx.exact
        hits = sum(
            len(np.intersect1d(exact.indices[i], approx.indices[i]))
            for i in range(1200)
        )
        assert hits / (1200 * 10) >= 0.9

    def test_hypercube_neighbours_share_cluster(self):
        from graphlens import generate_hypercube

        data, labels = generate_hypercube(400, seed=0)
        knn = build_knn(data.feature_matrix(), 15)
        agreement = (labels[knn.indices] == labels[:, None]).mean()
        assert agreement >= 0.95


class TestSmoothWeights:
    def test_nearest_neighbour_weight_is_one(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=(60, 3))
        knn = build_knn(x, 7)
        g = smooth_weights(knn)
        for i in range(60):
            nearest = knn.indices[i, 0]
            cols, weights = g.row(i)
            assert weights[list(cols).index(nearest)] == np.float32(1.0)

    def test_equal_distances_give_all_ones(self):
        idx = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])
        dst = np.full((4, 3), 0.7)
        g = smooth_weights(KnnGraph(idx, dst, "euclidean"))
        assert np.all(g.weights == np.float32(1.0))

    def test_matches_independent_bisection(self):
        # every vertex sees the same distance profile [1, 2, 3, 4]
        idx = np.array([[(i + o) % 5 for o in (1, 2, 3, 4)] for i in range(5)])
        dst = np.tile([1.0, 2.0, 3.0, 4.0], (5, 1))
        g = smooth_weights(KnnGraph(idx, dst, "euclidean"))
        _, expected = sigma_oracle(dst[0])
        cols, got = g.row(0)
        by_neighbour = {int(c): float(w) for c, w in zip(cols, got)}
        for neighbour, want in zip(idx[0], expected):
            assert by_neighbour[int(neighbour)] == pytest.approx(want, abs=1e-6)

    def test_row_sums_hit_log2k(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=(100, 4))
        g = smooth_weights(build_knn(x, 8))
        sums = np.add.reduceat(g.weights.astype(np.float64), g.indptr[:-1])
        assert np.all(np.abs(sums - np.log2(8)) <= 1e-5)

    def test_duplicate_rows_stay_fully_connected(self):
        x = np.vstack([np.zeros((3, 2)), np.random.default_rng(0).normal(size=(10, 2))])
        g = smooth_weights(build_knn(x, 4))
        # the three identical rows give each other weight 1
        for i in range(3):
            cols, weights = g.row(i)
            for other in range(3):
                if other != i:
                    assert weights[list(cols).index(other)] == np.float32(1.0)


class TestBuildManifold:
    def test_symmetric_with_unit_interval_weights(self, small_manifold):
        small_manifold.validate()
        assert small_manifold.weights.max() <= 1.0
        assert small_manifold.weights.min() > 0.0

    def test_degree_at_least_k(self):
        rng = np.random.default_rng(10)
        x = rng.normal(size=(100, 5))
        m = build_manifold(x, 10)
        assert np.all(m.degrees() >= 10)

    def test_lens_history_empty(self, small_manifold):
        assert small_manifold.lens_history == ()
