"""Build the initial manifold: k-NN search, density-adaptive weights, union.

All metrics reduce to squared euclidean distance on transformed rows:
cosine normalises rows to unit length, correlation centres them first.
That keeps the exact and the approximate search backends numerically
consistent, and makes correlation distance inherently clamped to [0, 2].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from .dataset import Dataset
from .errors import EmptyDataset, GraphLensError, KOutOfRange, NonFiniteInput
from .graph import INDEX_DTYPE, DirectedWeightedGraph, Manifold, symmetrize_union

__all__ = [
    "METRICS",
    "KnnGraph",
    "build_knn",
    "smooth_weights",
    "build_manifold",
    "pairwise_distance",
]

METRICS = ("euclidean", "cosine", "correlation")

#: exact brute-force search below this many rows, neighbour descent above
EXACT_SEARCH_LIMIT = 20_000

SIGMA_LO = 1e-8
SIGMA_HI = 1e6
SIGMA_ITERATIONS = 64
# tighter than the 1e-5 contract so float32 weight rounding cannot push the
# realised row sums past it
SIGMA_TOLERANCE = 1e-7


@dataclass
class KnnGraph:
    """k nearest neighbours per vertex, sorted ascending by distance.

    ``exact`` is False when the approximate search backend produced the
    graph; distances are in the requested metric either way.
    """

    indices: np.ndarray
    distances: np.ndarray
    metric: str
    exact: bool = True

    @property
    def n_vertices(self) -> int:
        return self.indices.shape[0]

    @property
    def k(self) -> int:
        return self.indices.shape[1]


def as_matrix(data) -> np.ndarray:
    """Accept a Dataset or an array; return the (N, D) float64 matrix."""
    if isinstance(data, Dataset):
        return data.feature_matrix()
    return np.asarray(data, dtype=np.float64)


def metric_transform(x: np.ndarray, metric: str) -> np.ndarray:
    """Rows transformed so squared euclidean realises the metric.

    euclidean: identity. cosine: unit-length rows (zero rows left at zero).
    correlation: rows centred, then unit length. For the latter two the
    metric distance is half the squared euclidean distance between
    transformed rows, i.e. 1 - cos / 1 - r for non-degenerate rows.
    """
    if metric == "euclidean":
        return np.ascontiguousarray(x, dtype=np.float64)
    if metric == "correlation":
        x = x - x.mean(axis=1, keepdims=True)
    elif metric != "cosine":
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    safe = np.where(norms == 0, 1.0, norms)
    return np.ascontiguousarray(x / safe, dtype=np.float64)


def _from_sqeuclidean(sq: np.ndarray, metric: str) -> np.ndarray:
    sq = np.maximum(sq, 0.0)
    if metric == "euclidean":
        return np.sqrt(sq)
    return sq / 2.0


def pairwise_distance(a: np.ndarray, b: np.ndarray, metric: str) -> np.ndarray:
    """Dense distance matrix between the rows of ``a`` and ``b``."""
    ta = metric_transform(np.atleast_2d(a), metric)
    tb = metric_transform(np.atleast_2d(b), metric)
    return _from_sqeuclidean(cdist(ta, tb, "sqeuclidean"), metric)


def _brute_knn(transformed: np.ndarray, k: int, block: int = 2048):
    """Exact k-NN by blocked pairwise scan; ties broken by neighbour index."""
    n = transformed.shape[0]
    idx = np.empty((n, k), dtype=INDEX_DTYPE)
    dst = np.empty((n, k), dtype=np.float64)
    for start in range(0, n, block):
        stop = min(start + block, n)
        sq = cdist(transformed[start:stop], transformed, "sqeuclidean")
        sq[np.arange(stop - start), np.arange(start, stop)] = np.inf
        part = np.argpartition(sq, k - 1, axis=1)[:, :k]
        part_d = np.take_along_axis(sq, part, axis=1)
        # sort the k candidates by (distance, index)
        for r in range(stop - start):
            order = np.lexsort((part[r], part_d[r]))
            idx[start + r] = part[r][order]
            dst[start + r] = part_d[r][order]
    return idx, dst


def build_knn(
    data,
    k: int,
    metric: str = "euclidean",
    *,
    exact_threshold: int = EXACT_SEARCH_LIMIT,
    seed: int = 0,
) -> KnnGraph:
    """k nearest neighbours of every row under the metric.

    Exact below ``exact_threshold`` rows; above it a seeded neighbour
    descent runs and the result is spot-checked to at least 0.9 recall on
    100 sampled vertices (raises if the check fails).
    """
    x = as_matrix(data)
    n = x.shape[0]
    if n < 2:
        raise EmptyDataset("need at least two rows to build a neighbour graph")
    if not np.isfinite(x).all():
        raise NonFiniteInput("data contains NaN or infinite values")
    if not 1 <= k <= n - 1:
        raise KOutOfRange(f"k={k} outside [1, {n - 1}]")
    transformed = metric_transform(x, metric)
    if n <= exact_threshold:
        idx, sq = _brute_knn(transformed, k)
        return KnnGraph(idx, _from_sqeuclidean(sq, metric), metric, exact=True)

    from ._nn_descent import nn_descent

    idx, sq = nn_descent(transformed, k, seed=seed)
    _check_recall(transformed, idx, seed=seed)
    return KnnGraph(
        idx.astype(INDEX_DTYPE),
        _from_sqeuclidean(sq.astype(np.float64), metric),
        metric,
        exact=False,
    )


def _check_recall(transformed, approx_idx, seed, sample=100, required=0.9):
    n, k = approx_idx.shape
    rng = np.random.default_rng(seed)
    probes = rng.choice(n, size=min(sample, n), replace=False)
    sq = cdist(transformed[probes], transformed, "sqeuclidean")
    sq[np.arange(len(probes)), probes] = np.inf
    true_idx = np.argpartition(sq, k - 1, axis=1)[:, :k]
    hits = 0
    for r, p in enumerate(probes):
        hits += len(np.intersect1d(true_idx[r], approx_idx[p]))
    recall = hits / (len(probes) * k)
    if recall < required:
        raise GraphLensError(
            f"approximate neighbour search recall {recall:.3f} below {required}"
        )


def smooth_weights(knn: KnnGraph) -> DirectedWeightedGraph:
    """Density-adaptive edge weights from neighbour distances.

    Per vertex, rho is the smallest strictly positive neighbour distance
    (zero-distance duplicates are skipped so identical rows stay fully
    connected) and sigma solves

        sum_j exp(-max(0, d_j - rho) / sigma) = log2(k)

    by bisection. The weight to each neighbour is the summand; the nearest
    neighbour always gets weight exactly 1.
    """
    d = np.asarray(knn.distances, dtype=np.float64)
    n, k = d.shape
    positive = d > 0
    first_pos = np.where(positive.any(axis=1), positive.argmax(axis=1), 0)
    rho = np.where(positive.any(axis=1), d[np.arange(n), first_pos], 0.0)
    adj = np.maximum(d - rho[:, None], 0.0)

    target = np.log2(k)
    lo = np.full(n, SIGMA_LO)
    hi = np.full(n, SIGMA_HI)
    sigma = np.full(n, (SIGMA_LO + SIGMA_HI) / 2.0)
    active = np.ones(n, dtype=bool)
    for _ in range(SIGMA_ITERATIONS):
        sigma[active] = 0.5 * (lo[active] + hi[active])
        total = np.exp(-adj[active] / sigma[active, None]).sum(axis=1)
        done = np.abs(total - target) < SIGMA_TOLERANCE
        too_big = total > target
        rows = np.flatnonzero(active)
        hi[rows[too_big]] = sigma[rows[too_big]]
        lo[rows[~too_big]] = sigma[rows[~too_big]]
        active[rows[done]] = False
        if not active.any():
            break

    weights = np.exp(-adj / sigma[:, None])
    rows = np.repeat(np.arange(n, dtype=np.int64), k)
    coo = sp.coo_matrix(
        (weights.ravel(), (rows, knn.indices.ravel().astype(np.int64))),
        shape=(n, n),
    )
    return DirectedWeightedGraph.from_csr(coo)


def build_manifold(
    data,
    k: int,
    metric: str = "euclidean",
    *,
    exact_threshold: int = EXACT_SEARCH_LIMIT,
    seed: int = 0,
) -> Manifold:
    """k-NN search, weight smoothing and probabilistic-union symmetrisation."""
    knn = build_knn(data, k, metric, exact_threshold=exact_threshold, seed=seed)
    directed = smooth_weights(knn)
    return symmetrize_union(directed)
