"""Exception hierarchy shared across the package.

Every error raised by graphlens derives from :class:`GraphLensError` so
callers can catch one type at an API boundary. The leaf classes mirror the
failure modes of the individual subsystems; most carry a plain message,
a few carry structured context (row/column, epoch).
"""


class GraphLensError(Exception):
    """Base class for all graphlens errors."""


# --- data ingestion ---------------------------------------------------------


class EmptyDataset(GraphLensError):
    """Dataset has no rows (or too few for the requested operation)."""


class NonFiniteInput(GraphLensError):
    """Input matrix contains NaN or infinite values."""


class ParseError(GraphLensError):
    """Delimited text could not be parsed."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class AllMissingColumn(GraphLensError):
    """A column consists entirely of missing values."""


class MissingValue(GraphLensError):
    """Missing cell encountered under the ``error`` missing-value policy."""

    def __init__(self, row, col):
        super().__init__(f"missing value at row {row}, column {col!r}")
        self.row = row
        self.col = col


# --- manifold construction --------------------------------------------------


class KOutOfRange(GraphLensError):
    """Requested neighbour count k outside [1, N-1]."""


# --- lenses -----------------------------------------------------------------


class NonFiniteLens(GraphLensError):
    """Lens values contain NaN or infinite entries."""


class SegmentCountMismatch(GraphLensError):
    """Segment assignment does not cover the manifold's vertices."""


class VertexCountMismatch(GraphLensError):
    """Two graphs that must share a vertex set do not."""


class AsymmetricWeights(GraphLensError):
    """Directional weights disagree where a symmetric manifold was expected."""


# --- layout -----------------------------------------------------------------


class FitDiverged(GraphLensError):
    """Low-dimensional similarity curve fit failed to converge."""


class EigenFailure(GraphLensError):
    """Spectral initialisation eigensolver failed."""


class NonFiniteCoordinates(GraphLensError):
    """Layout optimisation produced NaN/inf coordinates."""

    def __init__(self, epoch):
        super().__init__(f"non-finite coordinates after epoch {epoch}")
        self.epoch = epoch


# --- analysis ---------------------------------------------------------------


class EmptySample(GraphLensError):
    """Statistical test received an empty sample."""


class DegenerateSelection(GraphLensError):
    """Contrast selection is empty, full, or otherwise uncontrastable."""


# --- benchmarking -----------------------------------------------------------


class DegenerateX(GraphLensError):
    """Regression predictor has no variance."""


# --- model files ------------------------------------------------------------


class BadMagic(GraphLensError):
    """File does not start with the model container magic bytes."""


class VersionMismatch(GraphLensError):
    """Model container version is not supported."""


class TruncatedFile(GraphLensError):
    """Model container ends before all declared payload bytes."""
