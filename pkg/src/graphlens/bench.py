"""Synthetic scaling benchmark for the lens filters.

Generates clustered datasets, times only the filter step of each lens
(mask-manifold construction and embedding are excluded), and regresses
compute time on the initial model's edge count per dataset size, lens
type, and parameter value.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .dataset import Dataset
from .errors import DegenerateX
from .lenses import apply_global_lens, apply_global_mask, apply_local_mask, segment_lens
from .manifold import build_knn, build_manifold, smooth_weights
from .graph import symmetrize_union

__all__ = [
    "generate_hypercube",
    "run_benchmark",
    "fit_regression",
    "BenchReport",
    "RegressionFit",
]

HYPERCUBE_DIM = 10
HYPERCUBE_CLUSTERS = 10
CLUSTER_NOISE = 0.1

DEFAULT_SIZES = (100, 1_000, 10_000)
DEFAULT_NEIGHBOR_GRID = (10, 20, 40)
DEFAULT_SEGMENT_GRID = (3, 6, 12, 24)
DEFAULT_GLOBAL_MASK_GRID = (20, 40, 80, 160)
DEFAULT_LOCAL_MASK_GRID = (5, 10, 20, 40)


def generate_hypercube(n_points: int, seed: int = 0, noise: float = CLUSTER_NOISE):
    """Clustered test data: 10 Gaussian blobs at distinct 10-cube vertices.

    Returns (Dataset, labels). Cluster sizes differ by at most one and the
    draw is fully determined by the seed. The first data column carries a
    noisy copy of the cluster id, usable as a lens dimension.
    """
    if n_points < HYPERCUBE_CLUSTERS:
        raise ValueError(f"need at least {HYPERCUBE_CLUSTERS} points")
    rng = np.random.default_rng(seed)
    corner_ids = rng.choice(2**HYPERCUBE_DIM, size=HYPERCUBE_CLUSTERS, replace=False)
    corners = (
        (corner_ids[:, None] >> np.arange(HYPERCUBE_DIM)[None, :]) & 1
    ).astype(np.float64)
    sizes = np.full(HYPERCUBE_CLUSTERS, n_points // HYPERCUBE_CLUSTERS)
    sizes[: n_points % HYPERCUBE_CLUSTERS] += 1
    labels = np.repeat(np.arange(HYPERCUBE_CLUSTERS), sizes)
    points = corners[labels] + rng.normal(0.0, noise, size=(n_points, HYPERCUBE_DIM))
    columns = [f"x{i}" for i in range(HYPERCUBE_DIM)]
    lens = labels + rng.normal(0.0, 0.05, size=n_points)
    matrix = np.column_stack([lens, points])
    data = Dataset(
        ["cluster_lens"] + columns,
        matrix,
        roles={"cluster_lens": "lens-only"},
    )
    return data, labels


@dataclass
class RegressionFit:
    """OLS fit of time (microseconds) on edge count, with 95% intervals."""

    slope: float
    intercept: float
    r_squared: float
    slope_interval: tuple
    intercept_interval: tuple
    n_points: int


def fit_regression(edge_counts, times_us) -> RegressionFit:
    """Ordinary least squares with t-distribution confidence intervals."""
    x = np.asarray(edge_counts, dtype=np.float64)
    y = np.asarray(times_us, dtype=np.float64)
    if x.size < 3:
        raise ValueError("need at least 3 points to fit")
    if np.allclose(x, x[0]):
        raise DegenerateX("all edge counts identical")
    fit = stats.linregress(x, y)
    t_crit = stats.t.ppf(0.975, x.size - 2)
    return RegressionFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue**2),
        slope_interval=(
            float(fit.slope - t_crit * fit.stderr),
            float(fit.slope + t_crit * fit.stderr),
        ),
        intercept_interval=(
            float(fit.intercept - t_crit * fit.intercept_stderr),
            float(fit.intercept + t_crit * fit.intercept_stderr),
        ),
        n_points=int(x.size),
    )


@dataclass
class BenchReport:
    """Raw timing rows plus per-group regression fits.

    Rows are dicts with n_points, k_neighbors, edge_count, lens, parameter
    (plus strategy for the global lens), repeat and time_us. Fits map a
    (n_points, lens, parameter) group to a RegressionFit across that
    group's edge counts, pooling the neighbour grid and repeats.
    """

    rows: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)

    def median_times(self, lens: str):
        """(edge_count, median time_us) pairs for one lens type."""
        groups = {}
        for row in self.rows:
            if row["lens"] != lens:
                continue
            groups.setdefault(
                (row["n_points"], row["k_neighbors"], row["parameter"]), []
            ).append(row)
        out = []
        for rows in groups.values():
            times = np.median([r["time_us"] for r in rows])
            out.append((rows[0]["edge_count"], float(times)))
        return sorted(out)

    def write_jsonl(self, path):
        with open(path, "w") as fh:
            for row in self.rows:
                fh.write(json.dumps(row) + "\n")

    def write_csv_summary(self, path):
        with open(path, "w") as fh:
            fh.write("n_points,lens,parameter,slope,intercept,r_squared,n\n")
            for (n_points, lens, parameter), fit in sorted(self.fits.items()):
                fh.write(
                    f"{n_points},{lens},{parameter},{fit.slope:.6g},"
                    f"{fit.intercept:.6g},{fit.r_squared:.4f},{fit.n_points}\n"
                )


def _time_us(fn) -> float:
    start = time.perf_counter_ns()
    fn()
    return (time.perf_counter_ns() - start) / 1e3


def run_benchmark(
    sizes=DEFAULT_SIZES,
    neighbor_grid=DEFAULT_NEIGHBOR_GRID,
    segment_grid=DEFAULT_SEGMENT_GRID,
    global_mask_grid=DEFAULT_GLOBAL_MASK_GRID,
    local_mask_grid=DEFAULT_LOCAL_MASK_GRID,
    repeats: int = 5,
    seeds=(0,),
    lenses=("global_lens", "global_mask", "local_mask"),
    progress=None,
) -> BenchReport:
    """Time the lens filters across dataset sizes and parameter grids.

    Only the filter step is inside the timed region: for the global lens
    that includes segmentation, for the global mask the mask manifold is
    built beforehand, for the local mask the lens distances are computed
    inside (they are part of the filter). Runs are strictly sequential.
    """
    report = BenchReport()
    for size in sizes:
        for seed in seeds:
            data, _ = generate_hypercube(size, seed=seed)
            features = data.feature_matrix()
            lens_values = data.column("cluster_lens")
            max_k = max(neighbor_grid)
            knn = build_knn(features, min(max_k, size - 1), "euclidean", seed=seed)
            for k in neighbor_grid:
                if k >= size:
                    continue
                sliced = type(knn)(
                    knn.indices[:, :k], knn.distances[:, :k], knn.metric, knn.exact
                )
                manifold = symmetrize_union(smooth_weights(sliced))
                edge_count = manifold.n_edges
                base = dict(
                    n_points=size, k_neighbors=k, edge_count=edge_count, seed=seed
                )
                if "global_lens" in lenses:
                    for segments in segment_grid:
                        for strategy in ("regular", "balanced"):
                            for rep in range(repeats):
                                t = _time_us(
                                    lambda: apply_global_lens(
                                        manifold,
                                        segment_lens(lens_values, segments, strategy),
                                    )
                                )
                                report.rows.append(
                                    base
                                    | dict(
                                        lens="global_lens",
                                        parameter=segments,
                                        strategy=strategy,
                                        repeat=rep,
                                        time_us=t,
                                    )
                                )
                if "global_mask" in lenses:
                    for mask_k in global_mask_grid:
                        if mask_k >= size:
                            continue
                        mask = build_manifold(
                            lens_values[:, None], mask_k, "euclidean", seed=seed
                        )
                        for rep in range(repeats):
                            t = _time_us(lambda: apply_global_mask(manifold, mask))
                            report.rows.append(
                                base
                                | dict(
                                    lens="global_mask",
                                    parameter=mask_k,
                                    repeat=rep,
                                    time_us=t,
                                )
                            )
                if "local_mask" in lenses:
                    for mask_k in local_mask_grid:
                        for rep in range(repeats):
                            t = _time_us(
                                lambda: apply_local_mask(
                                    manifold, lens_values, "euclidean", mask_k
                                )
                            )
                            report.rows.append(
                                base
                                | dict(
                                    lens="local_mask",
                                    parameter=mask_k,
                                    repeat=rep,
                                    time_us=t,
                                )
                            )
                if progress is not None:
                    progress(size, k)

    # regression per (size, lens, parameter) across the neighbour grid
    groups = {}
    for row in report.rows:
        key = (row["n_points"], row["lens"], row["parameter"])
        groups.setdefault(key, []).append(row)
    for key, rows in groups.items():
        x = [r["edge_count"] for r in rows]
        if len(set(x)) < 2 or len(x) < 3:
            continue
        report.fits[key] = fit_regression(x, [r["time_us"] for r in rows])
    return report
