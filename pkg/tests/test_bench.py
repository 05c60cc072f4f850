import json

import numpy as np
import pytest

import graphlens.bench as bench_mod
from graphlens import fit_regression, generate_hypercube, run_benchmark
from graphlens.errors import DegenerateX


class TestGenerateHypercube:
    def test_ten_equal_clusters(self):
        data, labels = generate_hypercube(100, seed=0)
        counts = np.bincount(labels)
        assert len(counts) == 10
        assert np.all(counts == 10)

    def test_uneven_sizes_differ_by_one(self):
        _, labels = generate_hypercube(97, seed=0)
        counts = np.bincount(labels)
        assert counts.max() - counts.min() <= 1

    def test_zero_noise_lands_on_cube_vertices(self):
        data, labels = generate_hypercube(50, seed=1, noise=0.0)
        points = data.feature_matrix()
        assert np.allclose(points, np.round(points))
        assert set(np.unique(np.round(points))) <= {0.0, 1.0}

    def test_deterministic_per_seed(self):
        a, la = generate_hypercube(64, seed=9)
        b, lb = generate_hypercube(64, seed=9)
        assert np.array_equal(a.matrix, b.matrix)
        assert np.array_equal(la, lb)

    def test_seeds_change_points_not_label_shape(self):
        a, la = generate_hypercube(64, seed=1)
        b, lb = generate_hypercube(64, seed=2)
        assert not np.array_equal(a.matrix, b.matrix)
        assert np.array_equal(np.bincount(la), np.bincount(lb))


class TestFitRegression:
    def test_perfect_line(self):
        x = np.arange(3, 13, dtype=float)
        fit = fit_regression(x, 2.0 * x + 1.0)
        assert fit.slope == pytest.approx(2.0, abs=1e-12)
        assert fit.intercept == pytest.approx(1.0, abs=1e-10)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.slope_interval[1] - fit.slope_interval[0] < 1e-9

    def test_noisy_line_interval_covers_truth(self):
        rng = np.random.default_rng(0)
        x = np.linspace(1, 20, 20)
        y = 2.0 * x + rng.normal(0, 0.05, 20)
        fit = fit_regression(x, y)
        assert fit.slope_interval[0] <= 2.0 <= fit.slope_interval[1]

    def test_two_points_rejected(self):
        with pytest.raises(ValueError):
            fit_regression([1.0, 2.0], [1.0, 2.0])

    def test_degenerate_x_rejected(self):
        with pytest.raises(DegenerateX):
            fit_regression([5.0, 5.0, 5.0], [1.0, 2.0, 3.0])


class TestRunBenchmark:
    def test_rows_and_fits_shape(self):
        report = run_benchmark(
            sizes=(100, 200),
            neighbor_grid=(5, 10),
            segment_grid=(4,),
            local_mask_grid=(5,),
            global_mask_grid=(10,),
            repeats=3,
            lenses=("global_lens", "local_mask"),
        )
        lens_rows = [r for r in report.rows if r["lens"] == "global_lens"]
        # sizes x k x strategies x repeats
        assert len(lens_rows) == 2 * 2 * 2 * 3
        assert all(r["time_us"] > 0 for r in report.rows)
        assert all(r["edge_count"] > 0 for r in report.rows)
        for key, fit in report.fits.items():
            assert fit.n_points >= 3

    def test_construction_outside_timed_region(self, monkeypatch):
        calls = {"knn": 0}
        real = bench_mod.build_knn

        def counting(*args, **kwargs):
            calls["knn"] += 1
            return real(*args, **kwargs)

        monkeypatch.setattr(bench_mod, "build_knn", counting)
        run_benchmark(
            sizes=(100,),
            neighbor_grid=(5, 10),
            segment_grid=(4, 8),
            repeats=4,
            lenses=("global_lens",),
        )
        # one search per (size, seed): never rebuilt inside the repeat loops
        assert calls["knn"] == 1

    def test_report_files_round_trip(self, tmp_path):
        report = run_benchmark(
            sizes=(100,),
            neighbor_grid=(5, 10, 20),
            segment_grid=(4,),
            repeats=2,
            lenses=("global_lens",),
        )
        jsonl = tmp_path / "bench.jsonl"
        csv = tmp_path / "bench.csv"
        report.write_jsonl(jsonl)
        report.write_csv_summary(csv)
        rows = [json.loads(line) for line in jsonl.read_text().splitlines()]
        assert len(rows) == len(report.rows)
        header = csv.read_text().splitlines()[0]
        assert header.startswith("n_points,lens,parameter,slope")

    def test_median_times_grouping(self):
        report = run_benchmark(
            sizes=(100,),
            neighbor_grid=(5, 10),
            segment_grid=(4,),
            repeats=3,
            lenses=("global_lens",),
        )
        med = report.median_times("global_lens")
        # one (edge_count, median) pair per (size, k, parameter) cell
        assert len(med) == 2
        assert all(t > 0 for _, t in med)
