"""Tabular dataset container and CSV ingestion.

A :class:`Dataset` is a rectangular numeric matrix with named columns.
Columns may be tagged with a role: ``feature`` columns feed the distance
metric, ``lens-only`` columns exist for lens functions and colouring, and
``label`` columns carry ground truth for evaluation. Ingestion applies a
missing-value policy so downstream code always sees finite values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import (
    AllMissingColumn,
    EmptyDataset,
    GraphLensError,
    MissingValue,
    NonFiniteInput,
    ParseError,
)

__all__ = ["Dataset", "load_csv", "knn_impute", "prune_missing"]


@dataclass
class Dataset:
    """Named-column numeric matrix.

    Parameters
    ----------
    columns: list of str
        Column names, one per matrix column.
    matrix: array of shape (n_rows, n_cols)
        Finite float64 values.
    roles: dict, optional
        Column name -> "feature" | "lens-only" | "label". Unlisted columns
        default to "feature".
    """

    columns: list
    matrix: np.ndarray
    roles: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = list(self.columns)
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.float64)
        if self.matrix.ndim != 2:
            raise ValueError("matrix must be 2-dimensional")
        if self.matrix.shape[1] != len(self.columns):
            raise ValueError("column names do not match matrix width")
        if self.matrix.shape[0] < 1:
            raise EmptyDataset("dataset must contain at least one row")
        bad = set(self.roles.values()) - {"feature", "lens-only", "label"}
        if bad:
            raise ValueError(f"unknown column roles: {sorted(bad)}")

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.matrix.shape[1]

    def role(self, name: str) -> str:
        return self.roles.get(name, "feature")

    def column(self, name: str) -> np.ndarray:
        """Values of one column by name."""
        try:
            idx = self.columns.index(name)
        except ValueError:
            raise KeyError(f"no column named {name!r}") from None
        return self.matrix[:, idx]

    def select(self, names) -> np.ndarray:
        """Matrix restricted to the given columns, in the given order."""
        return np.column_stack([self.column(n) for n in names])

    def feature_matrix(self) -> np.ndarray:
        """Matrix restricted to columns with the ``feature`` role."""
        names = [c for c in self.columns if self.role(c) == "feature"]
        return self.select(names)

    def digest(self) -> str:
        """SHA-256 over the column names and matrix bytes."""
        import hashlib

        h = hashlib.sha256()
        h.update("\x1f".join(self.columns).encode())
        h.update(self.matrix.tobytes())
        return h.hexdigest()


def knn_impute(matrix: np.ndarray, k: int = 5) -> np.ndarray:
    """Fill missing cells from each row's k nearest complete-case rows.

    For a row with missing cells, distance to every complete row is the
    euclidean distance over the columns where the incomplete row is
    observed. Each missing cell takes the mean of its column among the k
    nearest complete rows.
    """
    x = np.array(matrix, dtype=np.float64, copy=True)
    missing = np.isnan(x)
    if not missing.any():
        return x
    if missing.all(axis=0).any():
        bad = int(np.flatnonzero(missing.all(axis=0))[0])
        raise AllMissingColumn(f"column {bad} has no observed values")
    complete = ~missing.any(axis=1)
    if not complete.any():
        raise GraphLensError("k-NN imputation requires at least one complete row")
    pool = x[complete]
    k_eff = min(k, pool.shape[0])
    for i in np.flatnonzero(missing.any(axis=1)):
        observed = ~missing[i]
        diff = pool[:, observed] - x[i, observed]
        dist = np.einsum("ij,ij->i", diff, diff)
        nearest = np.argpartition(dist, k_eff - 1)[:k_eff]
        x[i, missing[i]] = pool[nearest][:, missing[i]].mean(axis=0)
    return x


def prune_missing(
    frame: pd.DataFrame,
    max_col_missing: float | None = None,
    max_row_missing: float | None = None,
) -> pd.DataFrame:
    """Drop columns then rows whose missing fraction exceeds a threshold."""
    if max_col_missing is not None:
        keep = frame.isna().mean(axis=0) <= max_col_missing
        frame = frame.loc[:, keep]
    if max_row_missing is not None:
        keep = frame.isna().mean(axis=1) <= max_row_missing
        frame = frame.loc[keep, :]
    return frame


def from_frame(frame: pd.DataFrame, missing="error", roles=None) -> Dataset:
    """Convert a pandas frame to a Dataset, applying the missing-value policy.

    ``missing`` is ``"error"``, ``"drop_rows"``, or ``("knn_impute", k)``.
    Non-numeric columns are discarded.
    """
    numeric = frame.select_dtypes(include=[np.number])
    if numeric.shape[1] == 0:
        raise ParseError("no numeric columns found")
    values = numeric.to_numpy(dtype=np.float64)
    values[np.isinf(values)] = np.nan
    nan_mask = np.isnan(values)
    if nan_mask.all(axis=0).any():
        bad = numeric.columns[int(np.flatnonzero(nan_mask.all(axis=0))[0])]
        raise AllMissingColumn(f"column {bad!r} has no observed values")
    if missing == "error":
        if nan_mask.any():
            r, c = np.argwhere(nan_mask)[0]
            raise MissingValue(int(r), str(numeric.columns[c]))
    elif missing == "drop_rows":
        values = values[~nan_mask.any(axis=1)]
        if values.shape[0] == 0:
            raise EmptyDataset("all rows dropped by missing-value policy")
    elif isinstance(missing, tuple) and missing[0] == "knn_impute":
        values = knn_impute(values, k=int(missing[1]))
    else:
        raise ValueError(f"unknown missing-value policy: {missing!r}")
    if not np.isfinite(values).all():
        raise NonFiniteInput("non-finite values survived ingestion")
    return Dataset(list(map(str, numeric.columns)), values, roles=roles or {})


def load_csv(
    path,
    missing="error",
    roles=None,
    max_col_missing: float | None = None,
    max_row_missing: float | None = None,
) -> Dataset:
    """Load a delimited text file with a header row into a Dataset.

    Parameters
    ----------
    path: str or file-like
        CSV file with one header line.
    missing: "error" | "drop_rows" | ("knn_impute", k)
        Policy for missing cells, applied after the optional pruning.
    max_col_missing, max_row_missing: float, optional
        When given, columns (then rows) with a higher missing fraction are
        dropped before the policy runs.
    """
    try:
        frame = pd.read_csv(path)
    except pd.errors.ParserError as exc:
        line = getattr(exc, "lineno", None)
        raise ParseError(str(exc), line=line) from exc
    except (OSError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise ParseError(str(exc)) from exc
    frame = prune_missing(frame, max_col_missing, max_row_missing)
    if frame.shape[0] == 0:
        raise EmptyDataset("no rows after pruning")
    return from_frame(frame, missing=missing, roles=roles)
