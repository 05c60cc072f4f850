"""Exploration statistics: group contrasts and colour normalisation.

The contrast workflow answers "which features differ between the selected
points and the rest?" with a two-sample Kolmogorov-Smirnov test per
feature, ranked by the D statistic. Colour values are normalised by rank
so a handful of outliers cannot swallow the colour range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import kolmogorov
from scipy.stats import rankdata

from .dataset import Dataset
from .errors import DegenerateSelection, EmptySample

__all__ = [
    "ks_test",
    "ContrastResult",
    "contrast_selection",
    "equal_histogram_normalize",
]

SIGNIFICANCE_LEVEL = 0.05


def ks_test(sample_a, sample_b) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.

    D is the supremum distance between the two empirical CDFs, evaluated
    right-continuously at the pooled sample values. The p-value uses the
    asymptotic Kolmogorov distribution with effective size
    n_a * n_b / (n_a + n_b).
    """
    a = np.sort(np.asarray(sample_a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(sample_b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be non-empty")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    d = float(np.abs(cdf_a - cdf_b).max())
    effective = a.size * b.size / (a.size + b.size)
    p = float(kolmogorov(np.sqrt(effective) * d))
    return d, max(p, np.nextafter(0.0, 1.0))


@dataclass
class ContrastResult:
    """Per-feature contrast, sorted by descending D."""

    features: list
    d_statistics: np.ndarray
    p_values: np.ndarray
    significant: np.ndarray

    def top(self, count: int = 10) -> list:
        return [
            (self.features[i], float(self.d_statistics[i]), float(self.p_values[i]))
            for i in range(min(count, len(self.features)))
        ]


def contrast_selection(data: Dataset, selected, against="rest") -> ContrastResult:
    """Rank features by how much they differ between two point sets.

    ``selected`` holds row indices; ``against`` is "rest" or a second index
    set. Features with p below 0.05 are flagged significant.
    """
    selected = np.unique(np.asarray(selected, dtype=np.int64))
    n = data.n_rows
    if selected.size == 0:
        raise DegenerateSelection("selection is empty")
    if selected.size and (selected.min() < 0 or selected.max() >= n):
        raise DegenerateSelection("selection indices out of range")
    if isinstance(against, str) and against == "rest":
        mask = np.zeros(n, dtype=bool)
        mask[selected] = True
        other = np.flatnonzero(~mask)
        if other.size == 0:
            raise DegenerateSelection("selection covers the whole dataset")
    else:
        other = np.unique(np.asarray(against, dtype=np.int64))
        if other.size == 0:
            raise DegenerateSelection("contrast set is empty")
        if other.min() < 0 or other.max() >= n:
            raise DegenerateSelection("contrast indices out of range")

    stats = np.empty(data.n_cols)
    pvals = np.empty(data.n_cols)
    for c in range(data.n_cols):
        col = data.matrix[:, c]
        stats[c], pvals[c] = ks_test(col[selected], col[other])
    order = np.argsort(-stats, kind="stable")
    return ContrastResult(
        features=[data.columns[i] for i in order],
        d_statistics=stats[order],
        p_values=pvals[order],
        significant=pvals[order] < SIGNIFICANCE_LEVEL,
    )


def equal_histogram_normalize(values) -> np.ndarray:
    """Map values to [0, 1] by average rank; ties share an output value.

    Only the ordering of the input matters, so any strictly monotone
    transform of the values yields the same output and extreme outliers
    cannot compress the rest of the range.
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise EmptySample("cannot normalise an empty vector")
    if not np.isfinite(v).all():
        raise ValueError("values must be finite")
    if v.size == 1:
        return np.array([0.5])
    ranks = rankdata(v, method="average")
    return (ranks - 1.0) / (v.size - 1.0)
