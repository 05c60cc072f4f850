"""Lens functions: edge filters that adapt a manifold to a question.

Three lens types are supported. The global lens discretises one lens
dimension into segments and keeps edges within the same or neighbouring
segments. The global mask keeps edges that also occur in a second manifold
built over the lens dimensions. The local mask ranks each vertex's edges
by their lens-space length and keeps the shortest ones. All three only
remove edges; retained weights are carried over bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
import scipy.sparse as sp

from .errors import NonFiniteLens, SegmentCountMismatch
from .graph import (
    DirectedWeightedGraph,
    Manifold,
    check_same_vertices,
    symmetrize_max,
)
from .manifold import build_manifold, metric_transform

__all__ = [
    "GlobalLens",
    "GlobalMask",
    "LocalMask",
    "SegmentAssignment",
    "segment_lens",
    "apply_global_lens",
    "apply_global_mask",
    "apply_local_mask",
    "normalize_weights",
    "apply_lens_sequence",
    "lens_spec_to_dict",
    "lens_spec_from_dict",
]


# --- lens specifications ----------------------------------------------------


@dataclass(frozen=True)
class GlobalLens:
    """Segment one lens dimension; keep edges between adjacent segments."""

    dimension: str
    n_segments: int
    strategy: str = "regular"
    circular: bool = False

    def __post_init__(self):
        if self.n_segments < 1:
            raise ValueError("n_segments must be at least 1")
        if self.strategy not in ("regular", "balanced"):
            raise ValueError("strategy must be 'regular' or 'balanced'")


@dataclass(frozen=True)
class GlobalMask:
    """Keep edges that also occur in a manifold over the lens dimensions."""

    dimensions: tuple
    metric: str = "euclidean"
    mask_neighbors: int = 15

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        if not self.dimensions:
            raise ValueError("dimensions must be non-empty")
        if self.mask_neighbors < 1:
            raise ValueError("mask_neighbors must be at least 1")


@dataclass(frozen=True)
class LocalMask:
    """Keep each vertex's mask_neighbors shortest edges in lens distance."""

    dimensions: tuple
    metric: str = "euclidean"
    mask_neighbors: int = 15

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        if not self.dimensions:
            raise ValueError("dimensions must be non-empty")
        if self.mask_neighbors < 1:
            raise ValueError("mask_neighbors must be at least 1")


_SPEC_TAGS = {GlobalLens: "global_lens", GlobalMask: "global_mask", LocalMask: "local_mask"}


def lens_spec_to_dict(spec) -> dict:
    """JSON-encodable form of a lens spec; inverse of lens_spec_from_dict."""
    if isinstance(spec, GlobalLens):
        return {
            "type": "global_lens",
            "dimension": spec.dimension,
            "n_segments": spec.n_segments,
            "strategy": spec.strategy,
            "circular": spec.circular,
        }
    if isinstance(spec, (GlobalMask, LocalMask)):
        return {
            "type": _SPEC_TAGS[type(spec)],
            "dimensions": list(spec.dimensions),
            "metric": spec.metric,
            "mask_neighbors": spec.mask_neighbors,
        }
    raise TypeError(f"not a lens spec: {spec!r}")


def lens_spec_from_dict(payload: dict):
    kind = payload.get("type")
    if kind == "global_lens":
        return GlobalLens(
            dimension=payload["dimension"],
            n_segments=int(payload["n_segments"]),
            strategy=payload.get("strategy", "regular"),
            circular=bool(payload.get("circular", False)),
        )
    if kind in ("global_mask", "local_mask"):
        cls = GlobalMask if kind == "global_mask" else LocalMask
        return cls(
            dimensions=tuple(payload["dimensions"]),
            metric=payload.get("metric", "euclidean"),
            mask_neighbors=int(payload.get("mask_neighbors", 15)),
        )
    raise ValueError(f"unknown lens spec type: {kind!r}")


# --- segmentation -----------------------------------------------------------


@dataclass
class SegmentAssignment:
    """Per-point segment ids plus the cut points that produced them."""

    segments: np.ndarray
    n_segments: int
    boundaries: np.ndarray
    strategy: str

    def __post_init__(self):
        self.segments = np.asarray(self.segments, dtype=np.int64)


def segment_lens(values, n_segments: int, strategy: str = "regular") -> SegmentAssignment:
    """Discretise lens values into segments.

    ``regular`` splits [min, max] into equal-width intervals, half-open
    except the last; empty segments are kept so gaps in the lens dimension
    stay visible. ``balanced`` sorts the points by value (stable, so ties
    keep their original order) and cuts the sequence into consecutive runs
    whose sizes differ by at most one.
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    n = v.shape[0]
    if not np.isfinite(v).all():
        raise NonFiniteLens("lens values contain NaN or infinite entries")
    if n_segments < 1:
        raise ValueError("n_segments must be at least 1")
    if strategy == "regular":
        lo, hi = v.min(), v.max()
        edges = np.linspace(lo, hi, n_segments + 1)
        if hi == lo:
            seg = np.zeros(n, dtype=np.int64)
        else:
            seg = np.floor((v - lo) / (hi - lo) * n_segments).astype(np.int64)
            np.clip(seg, 0, n_segments - 1, out=seg)
        return SegmentAssignment(seg, n_segments, edges, "regular")
    if strategy == "balanced":
        if n_segments > n:
            raise ValueError(f"n_segments={n_segments} exceeds {n} points")
        order = np.argsort(v, kind="stable")
        sizes = np.full(n_segments, n // n_segments, dtype=np.int64)
        sizes[: n % n_segments] += 1
        seg = np.empty(n, dtype=np.int64)
        seg[order] = np.repeat(np.arange(n_segments), sizes)
        cuts = np.concatenate(([0], np.cumsum(sizes)))
        boundaries = np.concatenate(([v[order[0]]], v[order[cuts[1:] - 1]]))
        return SegmentAssignment(seg, n_segments, boundaries, "balanced")
    raise ValueError("strategy must be 'regular' or 'balanced'")


# --- filters ----------------------------------------------------------------


@numba.njit("b1[::1](i8[::1], f8[::1], i8)", cache=True)
def _keep_shortest_per_row(indptr, dist, k_mask):
    """Mark each row's k_mask smallest distances.

    A stable sort within the row keeps ties in column order, and CSR
    columns are sorted, so ties break by neighbour index for free.
    """
    keep = np.zeros(dist.shape[0], dtype=np.bool_)
    for i in range(indptr.shape[0] - 1):
        lo, hi = indptr[i], indptr[i + 1]
        degree = hi - lo
        if degree <= k_mask:
            keep[lo:hi] = True
            continue
        order = np.argsort(dist[lo:hi], kind="mergesort")
        for r in range(k_mask):
            keep[lo + order[r]] = True
    return keep


def _csr_rows(m: Manifold) -> np.ndarray:
    return np.repeat(np.arange(m.n_vertices, dtype=np.int64), m.degrees())


def _subset(m: Manifold, keep: np.ndarray) -> DirectedWeightedGraph:
    """Graph with only the kept entries; weights are sliced, never recomputed.

    Subsetting preserves the sorted CSR layout, so the arrays are used
    directly instead of going through a canonicalising sparse constructor.
    """
    rows = _csr_rows(m)[keep]
    counts = np.bincount(rows, minlength=m.n_vertices)
    indptr = np.concatenate(([0], np.cumsum(counts)))
    return DirectedWeightedGraph(
        m.n_vertices, indptr, m.indices[keep], m.weights[keep]
    )


def apply_global_lens(
    m: Manifold, seg: SegmentAssignment, circular: bool = False, spec=None
) -> Manifold:
    """Keep edges whose endpoints lie in the same or neighbouring segments.

    With ``circular`` the first and last segments also count as neighbours,
    closing the loop for cyclic lens domains.
    """
    if seg.segments.shape[0] != m.n_vertices:
        raise SegmentCountMismatch(
            f"{seg.segments.shape[0]} segment ids for {m.n_vertices} vertices"
        )
    s = seg.segments
    rows = _csr_rows(m)
    gap = np.abs(s[rows] - s[m.indices])
    keep = gap <= 1
    if circular and seg.n_segments >= 2:
        keep |= gap == seg.n_segments - 1
    filtered = _subset(m, keep)
    # the predicate is symmetric in (i, j), so the result already is
    out = Manifold(
        filtered.n_vertices,
        filtered.indptr,
        filtered.indices,
        filtered.weights,
        lens_history=m.lens_history,
    )
    if spec is None:
        spec = GlobalLens("<external>", seg.n_segments, seg.strategy, circular)
    return out.with_history(spec)


def apply_global_mask(m: Manifold, mask: Manifold, spec=None) -> Manifold:
    """Keep edges of ``m`` that also occur in the (symmetric) mask manifold.

    Mask weights are ignored; the surviving edges keep the weights they had
    in ``m``. The per-direction filter is re-symmetrised afterwards.
    """
    check_same_vertices(m, mask)
    n = m.n_vertices
    if mask.n_edges == 0:
        keep = np.zeros(m.n_edges, dtype=bool)
    else:
        # CSR order makes row*n+col keys globally sorted in both graphs
        keys = _csr_rows(m) * n + m.indices
        mask_keys = _csr_rows(mask) * n + mask.indices
        pos = np.searchsorted(mask_keys, keys).clip(max=mask_keys.shape[0] - 1)
        keep = mask_keys[pos] == keys
    out = symmetrize_max(_subset(m, keep), lens_history=m.lens_history)
    if spec is None:
        spec = GlobalMask(("<external>",), "euclidean", 1)
    return out.with_history(spec)


def apply_local_mask(
    m: Manifold,
    lens_values,
    metric: str = "euclidean",
    mask_neighbors: int = 15,
    spec=None,
) -> Manifold:
    """Keep, per vertex, the mask_neighbors incident edges shortest in lens space.

    Edge lengths are measured between the endpoints' lens vectors; each
    vertex ranks its incident edges ascending by that length (ties broken
    by neighbour index) and keeps ranks below mask_neighbors from its own
    perspective. Keeping an edge from either side keeps it, so every
    vertex retains at least min(mask_neighbors, degree) edges.
    """
    values = np.asarray(lens_values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if not np.isfinite(values).all():
        raise NonFiniteLens("lens values contain NaN or infinite entries")
    if values.shape[0] != m.n_vertices:
        raise SegmentCountMismatch(
            f"{values.shape[0]} lens rows for {m.n_vertices} vertices"
        )
    if mask_neighbors < 1:
        raise ValueError("mask_neighbors must be at least 1")

    transformed = metric_transform(values, metric)
    rows = _csr_rows(m)
    diff = transformed[rows] - transformed[m.indices]
    sq = np.einsum("ij,ij->i", diff, diff)
    dist = np.sqrt(np.maximum(sq, 0.0)) if metric == "euclidean" else sq / 2.0

    keep = _keep_shortest_per_row(m.indptr, dist, mask_neighbors)
    out = symmetrize_max(_subset(m, keep), lens_history=m.lens_history)
    if spec is None:
        spec = LocalMask(("<external>",), metric, mask_neighbors)
    return out.with_history(spec)


def normalize_weights(m: Manifold) -> Manifold:
    """Rescale weights so every non-isolated vertex has max incident weight 1.

    Each direction is divided by its row maximum and the two rescaled
    directions are recombined by elementwise maximum, which keeps the
    result symmetric and makes the operation a no-op on manifolds that
    already satisfy the row-max property.
    """
    if m.n_edges == 0:
        return m
    a = m.to_csr().astype(np.float64)
    row_max = np.zeros(m.n_vertices)
    np.maximum.at(row_max, _csr_rows(m), m.weights.astype(np.float64))
    safe = np.where(row_max > 0, row_max, 1.0)  # isolated rows: scale unused
    scaled = (sp.diags(1.0 / safe) @ a).tocsr()
    combined = scaled.maximum(scaled.T).tocsr()
    combined.data = combined.data.astype(np.float32)
    return Manifold.from_csr(combined, lens_history=m.lens_history)


def apply_lens_sequence(m: Manifold, specs, data) -> Manifold:
    """Fold a list of lens specs over a manifold, left to right.

    ``data`` supplies the lens dimensions by column name; it must be the
    Dataset the manifold was built from (or at least share its row order).
    """
    out = m
    for spec in specs:
        if isinstance(spec, GlobalLens):
            seg = segment_lens(
                data.column(spec.dimension), spec.n_segments, spec.strategy
            )
            out = apply_global_lens(out, seg, spec.circular, spec=spec)
        elif isinstance(spec, GlobalMask):
            mask = build_manifold(
                data.select(spec.dimensions), spec.mask_neighbors, spec.metric
            )
            out = apply_global_mask(out, mask, spec=spec)
        elif isinstance(spec, LocalMask):
            out = apply_local_mask(
                out,
                data.select(spec.dimensions),
                spec.metric,
                spec.mask_neighbors,
                spec=spec,
            )
        else:
            raise TypeError(f"not a lens spec: {spec!r}")
    return out
