"""Distance metrics, order statistics, and the two centroid estimators.

Conventions the rest of the package relies on:

* The scalar median of n values is the ceil(n/2)-th largest value -- the
  upper of the two middle elements when n is even.  It is always an element
  of the input, never an average of two elements.
* Squared Euclidean and Euclidean distance order any finite candidate set
  identically, so nearest-centroid assignment uses the squared form for
  both; this makes the two assignments equal by construction, ties and all.

All functions are pure and operate on float64 arrays.
"""

from __future__ import annotations

import enum

import numpy as np


class Metric(enum.Enum):
    """Cost function used when assigning points to centroids."""

    L1 = "l1"
    L2 = "l2"
    L2_SQUARED = "l2sq"


class CentroidEstimator(enum.Enum):
    """Location estimator used when re-fitting a cluster centroid."""

    COORD_MEDIAN = "median"
    COORD_MEAN = "mean"


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
        raise ValueError("expected a non-empty 2-D array of points")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    return pts


def distance(a, b, metric: Metric) -> float:
    """Distance between two equal-length vectors under `metric`."""
    av = np.asarray(a, dtype=float)
    bv = np.asarray(b, dtype=float)
    if av.shape != bv.shape:
        raise ValueError(f"dimension mismatch: {av.shape} vs {bv.shape}")
    diff = av - bv
    if metric is Metric.L1:
        return float(np.abs(diff).sum())
    sq = float(np.dot(diff, diff))
    if metric is Metric.L2_SQUARED:
        return sq
    return float(np.sqrt(sq))


def assignment_distances(points: np.ndarray, centroids: np.ndarray, metric: Metric) -> np.ndarray:
    """(n, k) matrix of point-to-centroid costs for nearest-centroid assignment.

    For L2 the squared form is returned: it induces the same argmin as the
    true distance and keeps L2 and L2_SQUARED assignments exactly identical.
    """
    if points.shape[1] != centroids.shape[1]:
        raise ValueError(
            f"dimension mismatch: points d={points.shape[1]}, centroids d={centroids.shape[1]}"
        )
    diff = points[:, None, :] - centroids[None, :, :]
    if metric is Metric.L1:
        return np.abs(diff).sum(axis=2)
    return (diff * diff).sum(axis=2)


def order_statistic(values, t: int) -> float:
    """t-th largest element (1-indexed); duplicates count with multiplicity."""
    v = np.asarray(values, dtype=float).ravel()
    n = v.size
    if n == 0:
        raise ValueError("order_statistic of an empty sequence")
    if not 1 <= t <= n:
        raise ValueError(f"t={t} out of range for {n} values")
    idx = n - t  # position of the t-th largest in ascending order
    return float(np.partition(v, idx)[idx])


def median_scalar(values) -> float:
    """The ceil(n/2)-th largest value; the upper middle element for even n."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("median of an empty sequence")
    return order_statistic(v, (v.size + 1) // 2)


def coordinatewise_median(points) -> np.ndarray:
    """Vector whose j-th coordinate is the scalar median of coordinate j.

    Selects an actual input value per coordinate, so the result is exactly
    invariant to the order of the points.
    """
    pts = _as_points(points)
    idx = pts.shape[0] // 2  # ascending position of the ceil(m/2)-th largest
    return np.partition(pts, idx, axis=0)[idx].copy()


def coordinatewise_mean(points) -> np.ndarray:
    """Arithmetic mean per coordinate.

    Each column is sorted before accumulation so the result does not depend
    on the order in which the points are supplied.
    """
    pts = _as_points(points)
    return np.sort(pts, axis=0).mean(axis=0)
