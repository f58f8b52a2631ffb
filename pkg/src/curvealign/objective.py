"""Joint-alignment objective: summed location-wise entropy or variance.

The alignment score of a set of transformed curves is the sum over time
steps of a spread estimate of the N amplitudes observed at that step.
Entropy (the Vasicek spacing estimator) makes no assumption about the
shape of the per-location distribution; plain variance is cheaper and
appropriate for unimodal data.  Lower is better in both cases.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .curves import CurveSet

# Spacings are floored before the logarithm so perfectly aligned (tied)
# samples produce a large negative entropy instead of -inf.
SPACING_FLOOR = 1e-12

MIN_ENTROPY_SAMPLES = 4


class ObjectiveKind(enum.Enum):
    ENTROPY_SUM = "entropy"
    VARIANCE_SUM = "variance"


@dataclass(frozen=True)
class ObjectiveValue:
    """Total alignment score plus its per-time-step breakdown."""

    total: float
    per_location: np.ndarray


def default_window(n: int) -> int:
    """Vasicek spacing window: floor(sqrt(N)) clamped to [1, floor(N/2)-1]."""
    return max(1, min(int(math.isqrt(n)), n // 2 - 1))


def vasicek_entropy(samples, m: int | None = None) -> float:
    """Vasicek order-statistic spacing estimate of differential entropy.

    With order statistics x_(1) <= ... <= x_(N), replicated past the
    boundaries, the estimate is

        (1/N) * sum_i ln( (N / 2m) * (x_(i+m) - x_(i-m)) )

    Parameters
    ----------
    samples : sequence of float
        At least 4 observations.
    m : int, optional
        Spacing window, 1 <= m < N/2.  Defaults to floor(sqrt(N)), clamped.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < MIN_ENTROPY_SAMPLES:
        raise ValueError(f"entropy estimation needs >= {MIN_ENTROPY_SAMPLES} samples, got {n}")
    if m is None:
        m = default_window(n)
    if not 1 <= m < n / 2:
        raise ValueError(f"spacing window must satisfy 1 <= m < N/2, got m={m}, N={n}")
    return float(_column_entropies(np.sort(x)[:, None], m)[0])


def _column_entropies(sorted_columns: np.ndarray, m: int) -> np.ndarray:
    """Vasicek estimate for each column of an (N, M) column-sorted array."""
    n = sorted_columns.shape[0]
    idx = np.arange(n)
    hi = np.minimum(idx + m, n - 1)
    lo = np.maximum(idx - m, 0)
    spacings = sorted_columns[hi] - sorted_columns[lo]
    np.maximum(spacings, SPACING_FLOOR, out=spacings)
    return np.mean(np.log((n / (2.0 * m)) * spacings), axis=0)


def location_variance(samples) -> float:
    """Population variance (divide by N) of the samples."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError(f"variance needs >= 2 samples, got {x.size}")
    return float(np.var(x))


def location_scores(matrix: np.ndarray, kind: ObjectiveKind) -> np.ndarray:
    """Per-time-step spread estimates for an (N, M) sample matrix.

    This is the single evaluation kernel shared by :func:`joint_objective`
    and the optimizer, so cached evaluations are bit-identical to full
    recomputation by construction.
    """
    n = matrix.shape[0]
    if kind is ObjectiveKind.VARIANCE_SUM:
        if n < 2:
            raise ValueError("variance objective needs >= 2 curves")
        return np.var(matrix, axis=0)
    if n < MIN_ENTROPY_SAMPLES:
        raise ValueError(
            f"entropy objective needs >= {MIN_ENTROPY_SAMPLES} curves, got {n}"
        )
    return _column_entropies(np.sort(matrix, axis=0), default_window(n))


def joint_objective(curve_set: CurveSet, kind: ObjectiveKind) -> ObjectiveValue:
    """Sum of location-wise spread estimates across the set's curves.

    The curves are used as-is: callers align first, then score.  Each time
    step is scored independently over the N amplitudes observed there and
    the scores are summed in index order.
    """
    per_location = location_scores(curve_set.sample_matrix(), kind)
    return ObjectiveValue(total=float(np.sum(per_location)), per_location=per_location)
