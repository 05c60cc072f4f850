"""Sparse weighted graphs and the symmetrisation primitives built on them.

Adjacency is stored in compressed sparse row form (row offsets, sorted
column indices, weights) so per-vertex merges used by the edge filters run
in O(degree) and iteration stays cache friendly. Weights are probabilities
in (0, 1] kept as float32, which is also the on-disk weight type.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cs_connected_components

from .errors import AsymmetricWeights, VertexCountMismatch

__all__ = [
    "DirectedWeightedGraph",
    "Manifold",
    "symmetrize_union",
    "symmetrize_max",
    "connected_components",
]

INDPTR_DTYPE = np.int64
INDEX_DTYPE = np.int32
WEIGHT_DTYPE = np.float32


@dataclass
class DirectedWeightedGraph:
    """Directed graph in CSR layout with probability weights.

    Parameters
    ----------
    n_vertices: int
        Number of vertices; column indices must stay below this.
    indptr: array of shape (n_vertices + 1,)
        Row offsets into ``indices``/``weights``.
    indices: array of shape (n_edges,)
        Column (neighbour) indices, sorted ascending within each row.
    weights: array of shape (n_edges,)
        Edge weights, strictly positive and at most 1.
    """

    n_vertices: int
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.indptr = np.ascontiguousarray(self.indptr, dtype=INDPTR_DTYPE)
        self.indices = np.ascontiguousarray(self.indices, dtype=INDEX_DTYPE)
        self.weights = np.ascontiguousarray(self.weights, dtype=WEIGHT_DTYPE)

    @property
    def n_edges(self) -> int:
        """Number of directed edges (CSR entries)."""
        return int(self.indices.shape[0])

    def degrees(self) -> np.ndarray:
        """Out-degree of every vertex."""
        return np.diff(self.indptr)

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbour indices and weights of vertex ``i`` (views, do not mutate)."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def to_csr(self) -> sp.csr_matrix:
        """View as a scipy CSR matrix (shares the underlying arrays)."""
        return sp.csr_matrix(
            (self.weights, self.indices, self.indptr),
            shape=(self.n_vertices, self.n_vertices),
        )

    @classmethod
    def from_csr(cls, mat: sp.spmatrix, **extra):
        """Build from any scipy sparse matrix, canonicalising the layout."""
        csr = mat.tocsr().copy()
        csr.sum_duplicates()
        csr.sort_indices()
        csr.eliminate_zeros()
        return cls(
            n_vertices=csr.shape[0],
            indptr=csr.indptr,
            indices=csr.indices,
            weights=csr.data,
            **extra,
        )

    def validate(self):
        """Check structural invariants, raising ValueError on violation."""
        if self.indptr.shape[0] != self.n_vertices + 1:
            raise ValueError("indptr length must be n_vertices + 1")
        if self.indptr[0] != 0 or self.indptr[-1] != self.indices.shape[0]:
            raise ValueError("indptr does not span the edge arrays")
        if np.any(np.diff(self.indptr) < 0):
            raise ValueError("indptr must be non-decreasing")
        if self.indices.shape[0] != self.weights.shape[0]:
            raise ValueError("indices and weights length mismatch")
        if self.n_edges == 0:
            return
        if self.indices.min() < 0 or self.indices.max() >= self.n_vertices:
            raise ValueError("neighbour index out of range")
        rows = np.repeat(np.arange(self.n_vertices), np.diff(self.indptr))
        if np.any(rows == self.indices):
            raise ValueError("self loops are not allowed")
        # sorted columns also rule out duplicate (i, j) pairs
        order_ok = np.ones(self.n_edges, dtype=bool)
        same_row = rows[1:] == rows[:-1]
        order_ok[1:] = ~same_row | (self.indices[1:] > self.indices[:-1])
        if not order_ok.all():
            raise ValueError("columns must be strictly increasing within a row")
        if np.any(self.weights <= 0) or np.any(self.weights > 1):
            raise ValueError("weights must lie in (0, 1]")

    def digest(self) -> str:
        """SHA-256 over shape and CSR payload; identifies the graph exactly."""
        h = hashlib.sha256()
        h.update(np.int64(self.n_vertices).tobytes())
        h.update(self.indptr.tobytes())
        h.update(self.indices.tobytes())
        h.update(self.weights.tobytes())
        return h.hexdigest()


@dataclass
class Manifold(DirectedWeightedGraph):
    """Symmetric weighted graph plus the lens applications that produced it.

    The symmetry invariant is (i, j, w) present iff (j, i, w) present with
    the same weight. ``lens_history`` records the lens specs applied so far,
    oldest first.
    """

    lens_history: tuple = field(default_factory=tuple)

    def __post_init__(self):
        super().__post_init__()
        self.lens_history = tuple(self.lens_history)

    def is_symmetric(self) -> bool:
        """True iff the adjacency equals its transpose exactly."""
        a = self.to_csr()
        return (a != a.T).nnz == 0

    def validate(self):
        super().validate()
        if not self.is_symmetric():
            raise ValueError("manifold adjacency must be symmetric")

    def with_history(self, spec) -> "Manifold":
        """Copy of this manifold with ``spec`` appended to the lens history."""
        return replace(self, lens_history=self.lens_history + (spec,))


def symmetrize_union(g: DirectedWeightedGraph) -> Manifold:
    """Symmetrise a directed graph with the probabilistic union.

    Treats each directed weight as the probability of the edge existing:
    for every unordered pair the result carries a + b - a*b, where a and b
    are the two directional weights (0 when absent). Union weights are
    accumulated in float64 before the float32 cast so the result never
    rounds below either input. Pairs whose union underflows to zero are
    dropped; they can never fire during sampling.
    """
    a = g.to_csr().astype(np.float64)
    at = a.T.tocsr()
    union = (a + at - a.multiply(at)).tocsr()
    union.data = union.data.astype(WEIGHT_DTYPE)
    return Manifold.from_csr(union, lens_history=())


def symmetrize_max(g: DirectedWeightedGraph, lens_history: tuple = ()) -> Manifold:
    """Re-symmetrise a per-direction filtered view of a symmetric manifold.

    An unordered pair survives if it survived in at least one direction; the
    weight is the (equal) weight the pair carried before filtering. Raises
    :class:`AsymmetricWeights` when the two directions disagree, which means
    the input was not a filtered view of a symmetric manifold.
    """
    a = g.to_csr()
    at = a.T.tocsr()
    # weights restricted to pairs present in both directions must agree
    fwd = a.multiply(at.astype(bool))
    bwd = at.multiply(a.astype(bool))
    if (fwd != bwd).nnz != 0:
        raise AsymmetricWeights("directional weights disagree; manifold corrupted")
    kept = a.maximum(at)
    return Manifold.from_csr(kept, lens_history=tuple(lens_history))


def connected_components(m: DirectedWeightedGraph) -> np.ndarray:
    """Label vertices by connected component, 0..c-1, treating edges as undirected."""
    if m.n_vertices == 0:
        return np.zeros(0, dtype=np.int64)
    _, labels = _cs_connected_components(m.to_csr(), directed=False)
    return labels.astype(np.int64)


def check_same_vertices(a: DirectedWeightedGraph, b: DirectedWeightedGraph):
    """Raise :class:`VertexCountMismatch` unless both graphs have equal vertex counts."""
    if a.n_vertices != b.n_vertices:
        raise VertexCountMismatch(
            f"vertex counts differ: {a.n_vertices} vs {b.n_vertices}"
        )
