"""graphlens: lens-filtered k-NN manifolds.

Build a UMAP-style weighted neighbour graph from tabular data, filter its
edges through lens functions (global lens, global mask, local mask), and
re-embed the filtered graph while keeping the previous layout as the
starting point. Ships with a CLI, a benchmark harness, and an HTTP service
backing an interactive explorer.
"""

__version__ = "0.1.0"

from .analysis import ContrastResult, contrast_selection, equal_histogram_normalize, ks_test
from .bench import BenchReport, fit_regression, generate_hypercube, run_benchmark
from .dataset import Dataset, load_csv
from .graph import (
    DirectedWeightedGraph,
    Manifold,
    connected_components,
    symmetrize_max,
    symmetrize_union,
)
from .layout import (
    Embedding,
    LayoutParams,
    fit_curve,
    optimize_layout,
    reembed,
    separate_components,
    spectral_init,
)
from .lenses import (
    GlobalLens,
    GlobalMask,
    LocalMask,
    SegmentAssignment,
    apply_global_lens,
    apply_global_mask,
    apply_lens_sequence,
    apply_local_mask,
    lens_spec_from_dict,
    lens_spec_to_dict,
    normalize_weights,
    segment_lens,
)
from .manifold import KnnGraph, build_knn, build_manifold, smooth_weights
from .model_io import ModelFile, load_model, save_model

__all__ = [
    "__version__",
    "BenchReport",
    "ContrastResult",
    "Dataset",
    "DirectedWeightedGraph",
    "Embedding",
    "GlobalLens",
    "GlobalMask",
    "KnnGraph",
    "LayoutParams",
    "LocalMask",
    "Manifold",
    "ModelFile",
    "SegmentAssignment",
    "apply_global_lens",
    "apply_global_mask",
    "apply_lens_sequence",
    "apply_local_mask",
    "build_knn",
    "build_manifold",
    "connected_components",
    "contrast_selection",
    "equal_histogram_normalize",
    "fit_curve",
    "fit_regression",
    "generate_hypercube",
    "ks_test",
    "lens_spec_from_dict",
    "lens_spec_to_dict",
    "load_csv",
    "load_model",
    "normalize_weights",
    "optimize_layout",
    "reembed",
    "run_benchmark",
    "save_model",
    "segment_lens",
    "separate_components",
    "smooth_weights",
    "spectral_init",
    "symmetrize_max",
    "symmetrize_union",
]
