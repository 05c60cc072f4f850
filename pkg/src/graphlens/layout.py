"""Embed a manifold into the plane.

Spectral initialisation gives each connected component a Laplacian-eigenmap
starting shape; stochastic gradient descent with negative sampling then
optimises positions, firing each edge at intervals inversely proportional
to its weight. Re-embedding after a lens warm-starts from the previous
layout so global structure survives the filter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import curve_fit

from ._rng import make_rng_state
from ._sgd import run_epoch
from .errors import FitDiverged, NonFiniteCoordinates, VertexCountMismatch
from .graph import Manifold, connected_components

__all__ = [
    "LayoutParams",
    "Embedding",
    "fit_curve",
    "spectral_init",
    "optimize_layout",
    "reembed",
    "separate_components",
]

#: vertical gap between stacked components, fraction of the tallest box
COMPONENT_GAP = 0.10

#: components smaller than this use a dense eigensolver
DENSE_EIGEN_LIMIT = 2000

#: default repulsion for initial embeddings and for post-lens re-embeddings
DEFAULT_REPULSION = 1.0
REEMBED_REPULSION = 0.5

CURVE_FIT_TOLERANCE = 1e-3


def fit_curve(min_dist: float, spread: float) -> tuple[float, float]:
    """Fit (a, b) of the similarity curve nu(r) = 1 / (1 + a r^(2b)).

    The target is 1 up to min_dist, then exp(-(r - min_dist) / spread).
    Raises :class:`FitDiverged` if the optimiser fails or the mean squared
    residual over [0, 3 * spread] exceeds 1e-3.
    """
    if not 0 < min_dist < spread:
        raise ValueError("need 0 < min_dist < spread")

    def curve(r, a, b):
        return 1.0 / (1.0 + a * r ** (2.0 * b))

    r = np.linspace(0.0, spread * 3.0, 300)
    target = np.where(r < min_dist, 1.0, np.exp(-(r - min_dist) / spread))
    try:
        (a, b), _ = curve_fit(curve, r, target)
    except RuntimeError as exc:
        raise FitDiverged(str(exc)) from exc
    residual = float(np.mean((curve(r, a, b) - target) ** 2))
    if residual > CURVE_FIT_TOLERANCE:
        raise FitDiverged(f"mean squared residual {residual:.2e} above tolerance")
    return float(a), float(b)


@dataclass
class LayoutParams:
    """Knobs of the SGD layout optimiser.

    ``n_epochs`` of None resolves to 500 for up to 10k vertices, 200 above.
    ``repulsion_strength`` of None resolves to 1.0 for initial embeddings
    and 0.5 when re-embedding after a lens. ``curve_a``/``curve_b`` are
    fitted from min_dist and spread when not given.
    """

    n_epochs: int | None = None
    learn_rate: float = 1.0
    negative_samples: int = 5
    repulsion_strength: float | None = None
    min_dist: float = 0.1
    spread: float = 1.0
    curve_a: float | None = None
    curve_b: float | None = None
    seed: int = 0
    deterministic: bool = True

    def __post_init__(self):
        if self.n_epochs is not None and self.n_epochs < 0:
            raise ValueError("n_epochs must be non-negative")
        if self.learn_rate <= 0:
            raise ValueError("learn_rate must be positive")
        if self.negative_samples < 0:
            raise ValueError("negative_samples must be non-negative")
        if self.repulsion_strength is not None and self.repulsion_strength < 0:
            raise ValueError("repulsion_strength must be non-negative")

    def curve(self) -> tuple[float, float]:
        if self.curve_a is not None and self.curve_b is not None:
            return self.curve_a, self.curve_b
        return fit_curve(self.min_dist, self.spread)

    def epochs_for(self, n_vertices: int) -> int:
        if self.n_epochs is not None:
            return self.n_epochs
        return 500 if n_vertices <= 10_000 else 200


@dataclass
class Embedding:
    """2-D coordinates plus provenance."""

    coords: np.ndarray
    source_digest: str = ""
    init_mode: str = "spectral"

    def __post_init__(self):
        self.coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        if self.coords.ndim != 2 or self.coords.shape[1] != 2:
            raise ValueError("coords must be of shape (n, 2)")

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]


def _normalized_laplacian(adj: sp.csr_matrix) -> sp.csr_matrix:
    deg = np.asarray(adj.sum(axis=1)).ravel()
    inv_sqrt = 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0))
    d = sp.diags(inv_sqrt)
    n = adj.shape[0]
    return (sp.identity(n, format="csr") - d @ adj @ d).tocsr()


def _component_coords(adj: sp.csr_matrix) -> np.ndarray:
    """Laplacian eigenmap of one connected component, scaled to diameter 10."""
    n = adj.shape[0]
    if n == 1:
        return np.zeros((1, 2))
    lap = _normalized_laplacian(adj)
    if n <= DENSE_EIGEN_LIMIT:
        _, vecs = np.linalg.eigh(lap.toarray())
    else:
        v0 = np.full(n, 1.0 / np.sqrt(n))
        _, vecs = spla.eigsh(
            lap, k=3, which="SM", v0=v0, tol=1e-4, maxiter=max(5 * n, 1000)
        )
    coords = np.zeros((n, 2))
    available = min(2, vecs.shape[1] - 1)
    coords[:, :available] = vecs[:, 1 : 1 + available]
    coords -= coords.mean(axis=0)
    extent = np.ptp(coords, axis=0).max()
    if extent > 0:
        coords *= 10.0 / extent
    return coords


def _singleton_grid(count: int, anchor_x: float, anchor_y: float, step: float):
    """Grid of positions starting at (anchor_x, anchor_y), growing right/down."""
    cols = max(1, int(np.ceil(np.sqrt(count))))
    out = np.empty((count, 2))
    for i in range(count):
        out[i, 0] = anchor_x + (i % cols) * step
        out[i, 1] = anchor_y - (i // cols) * step
    return out


def spectral_init(m: Manifold, seed: int = 0) -> Embedding:
    """Spectral starting layout, one eigenmap per connected component.

    Components are stacked vertically; vertices without any edge are set
    aside on a grid along the right margin. If the sparse eigensolver fails
    for a component the whole initialisation falls back to seeded random
    coordinates and the embedding is marked accordingly.
    """
    if m.n_vertices == 0:
        raise ValueError("cannot initialise an empty manifold")
    labels = connected_components(m)
    adj = m.to_csr().astype(np.float64)
    coords = np.zeros((m.n_vertices, 2))
    mode = "spectral"
    component_ids = np.unique(labels)
    sizes = np.bincount(labels)
    connected = [c for c in component_ids if sizes[c] > 1]
    singles = [c for c in component_ids if sizes[c] == 1]
    try:
        for c in connected:
            members = np.flatnonzero(labels == c)
            sub = adj[members][:, members].tocsr()
            coords[members] = _component_coords(sub)
    except (spla.ArpackError, np.linalg.LinAlgError):
        rng = np.random.default_rng(seed)
        coords = rng.uniform(-10.0, 10.0, size=(m.n_vertices, 2))
        return Embedding(coords, m.digest(), init_mode="random")

    if connected:
        # stack the real components, then park singletons on the margin
        connected_mask = np.isin(labels, connected)
        relabel = np.searchsorted(np.asarray(connected), labels[connected_mask])
        stacked = separate_components(
            Embedding(coords[connected_mask], m.digest(), mode), relabel
        )
        coords[connected_mask] = stacked.coords
        if singles:
            box_max = stacked.coords.max(axis=0)
            box_min = stacked.coords.min(axis=0)
            step = max((box_max[0] - box_min[0]) * 0.05, 1.0)
            grid = _singleton_grid(
                len(singles), box_max[0] + 2 * step, box_max[1], step
            )
            coords[~connected_mask] = grid
    elif singles:
        coords = _singleton_grid(len(singles), 0.0, 0.0, 1.0)
    return Embedding(coords, m.digest(), init_mode=mode)


def separate_components(e: Embedding, labels) -> Embedding:
    """Translate components so their bounding boxes stack vertically.

    Boxes appear in label order, top to bottom, with a gap of 10% of the
    tallest box height between consecutive boxes; x centres are aligned.
    Only translations are applied, so within-component geometry is exact.
    """
    labels = np.asarray(labels)
    if labels.shape[0] != e.n_points:
        raise VertexCountMismatch("labels do not cover the embedding")
    coords = e.coords.copy()
    ids = np.unique(labels)
    if ids.shape[0] <= 1:
        return Embedding(coords, e.source_digest, e.init_mode)
    heights = []
    for c in ids:
        ys = coords[labels == c, 1]
        heights.append(float(ys.max() - ys.min()))
    gap = COMPONENT_GAP * max(heights) if max(heights) > 0 else 1.0
    top = 0.0
    for c in ids:
        members = labels == c
        box_min = coords[members].min(axis=0)
        box_max = coords[members].max(axis=0)
        shift_x = -(box_min[0] + box_max[0]) / 2.0
        shift_y = top - box_max[1]
        coords[members, 0] += shift_x
        coords[members, 1] += shift_y
        top = top - (box_max[1] - box_min[1]) - gap
    return Embedding(coords, e.source_digest, e.init_mode)


def optimize_layout(
    m: Manifold,
    init: Embedding,
    params: LayoutParams | None = None,
    *,
    repulsion_default: float = DEFAULT_REPULSION,
    progress=None,
) -> Embedding:
    """Run the sampling-based SGD over the manifold's edges.

    Each directed edge fires at epochs spaced 1/weight apart, pulling its
    endpoints together along the gradient of the log similarity; every
    firing also pushes the head away from ``negative_samples`` uniformly
    random vertices. Steps are clipped to a displacement of at most
    4 * learn-rate, and the learn rate decays linearly to zero.
    """
    params = params or LayoutParams()
    if init.n_points != m.n_vertices:
        raise VertexCountMismatch(
            f"init has {init.n_points} points for {m.n_vertices} vertices"
        )
    n_epochs = params.epochs_for(m.n_vertices)
    coords = init.coords.astype(np.float64).copy()
    if n_epochs == 0 or m.n_edges == 0:
        return Embedding(coords, m.digest(), init.init_mode)
    if not np.isfinite(coords).all():
        raise NonFiniteCoordinates(-1)

    a, b = params.curve()
    gamma = (
        params.repulsion_strength
        if params.repulsion_strength is not None
        else repulsion_default
    )
    head = np.repeat(
        np.arange(m.n_vertices, dtype=np.int32), np.diff(m.indptr).astype(np.int64)
    )
    tail = m.indices.astype(np.int32)
    epochs_per_sample = 1.0 / m.weights.astype(np.float64)
    epoch_of_next_sample = np.zeros_like(epochs_per_sample)
    rng_state = make_rng_state(params.seed)

    for epoch in range(n_epochs):
        alpha = params.learn_rate * (1.0 - epoch / n_epochs)
        run_epoch(
            coords,
            head,
            tail,
            epochs_per_sample,
            epoch_of_next_sample,
            float(a),
            float(b),
            float(gamma),
            float(alpha),
            int(params.negative_samples),
            epoch,
            rng_state,
        )
        if not np.isfinite(coords).all():
            raise NonFiniteCoordinates(epoch)
        if progress is not None:
            progress(epoch + 1, n_epochs)
    return Embedding(coords, m.digest(), init.init_mode)


def reembed(
    m_lensed: Manifold,
    previous: Embedding,
    params: LayoutParams | None = None,
    *,
    progress=None,
) -> Embedding:
    """Re-optimise after a lens, warm-starting from the previous layout.

    Components gained by the filter are not pre-separated; any separation
    emerges from the forces. Unless overridden, repulsion is halved
    relative to an initial embedding to balance the lost attraction.
    """
    params = params or LayoutParams()
    warm = Embedding(previous.coords, previous.source_digest, "warm_start")
    return optimize_layout(
        m_lensed,
        warm,
        params,
        repulsion_default=REEMBED_REPULSION,
        progress=progress,
    )
