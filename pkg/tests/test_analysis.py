import numpy as np
import pytest

from graphlens import Dataset, contrast_selection, equal_histogram_normalize, ks_test
from graphlens.errors import DegenerateSelection, EmptySample

from oracles import ks_oracle


class TestKsTest:
    def test_identical_samples_give_zero(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=100)
        d, p = ks_test(x, x)
        assert d == 0.0
        assert p == 1.0

    def test_disjoint_supports_give_one(self):
        d, p = ks_test([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
        assert d == 1.0
        assert p < 0.2

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(1)
        for seed in range(20):
            local = np.random.default_rng(seed)
            a = local.normal(0, 1, size=int(local.integers(5, 80)))
            b = local.normal(local.uniform(-1, 1), 1, size=int(local.integers(5, 80)))
            d, _ = ks_test(a, b)
            assert d == pytest.approx(ks_oracle(a, b), abs=1e-12)

    def test_shifted_normals_significant(self):
        rng = np.random.default_rng(2)
        a = rng.normal(0, 1, 500)
        b = rng.normal(1, 1, 500)
        d, p = ks_test(a, b)
        assert d > 0.3
        assert p < 0.01

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=60)
        b = rng.normal(0.4, 1.2, size=45)
        d1, _ = ks_test(a, b)
        d2, _ = ks_test(np.exp(a), np.exp(b))
        assert d1 == pytest.approx(d2, abs=1e-12)

    def test_empty_sample_rejected(self):
        with pytest.raises(EmptySample):
            ks_test([], [1.0])


def shifted_dataset(seed, n=120, shift_col=2, shift=2.0, selected_count=30):
    rng = np.random.default_rng(seed)
    matrix = rng.normal(size=(n, 5))
    selected = rng.choice(n, size=selected_count, replace=False)
    matrix[selected, shift_col] += shift
    names = [f"f{i}" for i in range(5)]
    return Dataset(names, matrix), selected, names[shift_col]


class TestContrastSelection:
    def test_shifted_feature_ranks_first(self):
        data, selected, name = shifted_dataset(0)
        result = contrast_selection(data, selected)
        assert result.features[0] == name
        assert result.significant[0]

    def test_complement_swap_symmetric(self):
        data, selected, _ = shifted_dataset(1)
        rest = np.setdiff1d(np.arange(data.n_rows), selected)
        a = contrast_selection(data, selected)
        b = contrast_selection(data, rest)
        assert a.features == b.features
        assert np.allclose(a.d_statistics, b.d_statistics)

    def test_explicit_against_set(self):
        data, selected, name = shifted_dataset(2)
        rest = np.setdiff1d(np.arange(data.n_rows), selected)
        result = contrast_selection(data, selected, against=rest)
        assert result.features[0] == name

    def test_affine_rescaling_keeps_order(self):
        data, selected, _ = shifted_dataset(3)
        scaled = Dataset(
            data.columns, data.matrix * np.array([3.0, 0.5, 10.0, 1.0, 7.0]) + 4.0
        )
        a = contrast_selection(data, selected)
        b = contrast_selection(scaled, selected)
        assert a.features == b.features

    def test_degenerate_selections(self):
        data, selected, _ = shifted_dataset(4)
        with pytest.raises(DegenerateSelection):
            contrast_selection(data, [])
        with pytest.raises(DegenerateSelection):
            contrast_selection(data, np.arange(data.n_rows))
        with pytest.raises(DegenerateSelection):
            contrast_selection(data, [data.n_rows + 4])


class TestEqualHistogramNormalize:
    def test_rank_example_with_ties(self):
        out = equal_histogram_normalize([10.0, 20.0, 20.0, 1000.0])
        assert np.allclose(out, [0.0, 0.5, 0.5, 1.0])

    def test_constant_vector_is_half(self):
        assert np.allclose(equal_histogram_normalize([7.0] * 9), 0.5)

    def test_single_value(self):
        assert equal_histogram_normalize([3.0]) == np.array([0.5])

    def test_strictly_increasing_preserved(self):
        rng = np.random.default_rng(0)
        v = np.cumsum(rng.uniform(0.1, 1.0, 50))
        out = equal_histogram_normalize(v)
        assert np.all(np.diff(out) > 0)
        assert out[0] == 0.0 and out[-1] == 1.0

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(1)
        v = rng.normal(size=40)
        assert np.allclose(
            equal_histogram_normalize(v), equal_histogram_normalize(np.tanh(v))
        )

    def test_outlier_does_not_compress_range(self):
        v = np.concatenate([np.linspace(0, 1, 99), [1e9]])
        out = equal_histogram_normalize(v)
        # the 99 ordinary values still cover almost the whole range
        assert out[98] - out[0] > 0.97
