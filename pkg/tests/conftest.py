import sys
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sp

sys.path.insert(0, str(Path(__file__).parent))

from graphlens import Dataset, Manifold, build_manifold


def random_manifold(seed, n_min=10, n_max=200, k_max=20, dims=(2, 3, 5)):
    """Manifold built from random Gaussian data; shape varies with the seed."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    k = int(rng.integers(2, min(k_max, n - 1) + 1))
    d = int(rng.choice(dims))
    x = rng.normal(size=(n, d))
    return build_manifold(x, k), x


def random_symmetric_graph(seed, n_max=40):
    """Synthetic symmetric graph, not produced by the manifold pipeline.

    Covers shapes the builder never emits: isolated vertices, empty graphs,
    very low degrees, weights spread over the whole (0, 1] range.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, n_max + 1))
    density = rng.uniform(0.0, 0.25)
    rows, cols, weights = [], [], []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                w = np.float32(rng.uniform(1e-6, 1.0))
                rows += [i, j]
                cols += [j, i]
                weights += [w, w]
    mat = sp.csr_matrix(
        (np.array(weights, dtype=np.float32), (rows, cols)), shape=(n, n)
    )
    return Manifold.from_csr(mat)


@pytest.fixture
def small_points():
    rng = np.random.default_rng(42)
    return rng.normal(size=(80, 4))


@pytest.fixture
def small_manifold(small_points):
    return build_manifold(small_points, 8)


@pytest.fixture
def toy_dataset():
    rng = np.random.default_rng(3)
    matrix = np.column_stack(
        [rng.normal(size=50), rng.uniform(size=50), rng.normal(2.0, 0.5, size=50)]
    )
    return Dataset(["alpha", "beta", "gamma"], matrix)


def teaser_bundle():
    """The 2-D stripes dataset used for warm-start separation checks.

    Ten vertical stripes; the lens value alternates between stripes, with a
    small vertical gradient so it is a proper scalar field. Low and high
    lens points interleave spatially, so the initial embedding mixes them.
    """
    rng = np.random.default_rng(7)
    n = 500
    pts = rng.uniform(0, 1, size=(n, 2))
    stripe = np.floor(pts[:, 0] * 10).astype(int)
    lens = (stripe % 2) * 1.0 + 0.05 * pts[:, 1] + rng.normal(0, 0.01, n)
    return pts, lens
