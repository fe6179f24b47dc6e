"""Clustering quality measures: mislabeling, confusion counts, centroid error.

Mislabeling is always computed over the true (non-outlier) points only; the
planted outliers receive labels like any other point but never enter the
numerator or denominator.  When cluster identities are not fixed by the
initialization (random starts), `mislabeling_aligned` minimizes over all
relabelings of the estimated clusters by exhaustive permutation search.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .datagen import OUTLIER_LABEL, Dataset

MAX_BRUTE_FORCE_K = 10


@dataclass
class ConfusionCounts:
    """Cross-tabulation of true vs estimated clusters.

    `counts[g, h]` is the number of non-outlier points of true cluster g
    assigned to estimated cluster h; planted outliers are tallied separately
    in `assigned_outliers`.
    """

    counts: np.ndarray
    true_sizes: np.ndarray
    assigned_true: np.ndarray
    assigned_outliers: np.ndarray

    @property
    def assigned_total(self) -> np.ndarray:
        """Points per estimated cluster, outliers included."""
        return self.assigned_true + self.assigned_outliers


def confusion(labels_hat, truth, k: int) -> ConfusionCounts:
    labels_hat = np.asarray(labels_hat)
    truth = np.asarray(truth)
    if labels_hat.shape != truth.shape:
        raise ValueError("labels and truth must have equal length")
    if labels_hat.size and (labels_hat.min() < 0 or labels_hat.max() >= k):
        raise ValueError("estimated labels out of range [0, k)")
    true_mask = truth != OUTLIER_LABEL
    if true_mask.any() and truth[true_mask].max() >= k:
        raise ValueError("truth labels out of range [0, k)")
    tl = truth[true_mask]
    el = labels_hat[true_mask]
    counts = np.bincount(tl * k + el, minlength=k * k).reshape(k, k)
    outliers = np.bincount(labels_hat[~true_mask], minlength=k)
    return ConfusionCounts(
        counts=counts,
        true_sizes=counts.sum(axis=1),
        assigned_true=counts.sum(axis=0),
        assigned_outliers=outliers,
    )


def mislabeling_raw(labels_hat, truth) -> float:
    """Fraction of non-outlier points whose label differs from the truth."""
    labels_hat = np.asarray(labels_hat)
    truth = np.asarray(truth)
    mask = truth != OUTLIER_LABEL
    if not mask.any():
        raise ValueError("mislabeling needs at least one non-outlier point")
    return float(np.mean(labels_hat[mask] != truth[mask]))


def mislabeling_aligned(labels_hat, truth, k: int) -> tuple[float, tuple[int, ...]]:
    """Minimum mislabeling over all relabelings of the estimated clusters.

    Returns the minimizing permutation as well: `perm[h]` is the true
    cluster matched to estimated cluster h.  Exhaustive search over the k!
    bijections; ties resolve to the lexicographically smallest permutation.
    """
    if k > MAX_BRUTE_FORCE_K:
        raise ValueError(
            f"alignment is exhaustive and supports k <= {MAX_BRUTE_FORCE_K}, got k={k}"
        )
    cm = confusion(labels_hat, truth, k).counts
    n_true = int(cm.sum())
    if n_true == 0:
        raise ValueError("mislabeling needs at least one non-outlier point")
    best_correct = -1
    best_perm: tuple[int, ...] = tuple(range(k))
    for perm in itertools.permutations(range(k)):
        correct = sum(cm[perm[h], h] for h in range(k))
        if correct > best_correct:
            best_correct = correct
            best_perm = perm
    return (n_true - best_correct) / n_true, best_perm


@dataclass
class CentroidErrorResult:
    """Estimated-to-true centroid matching that minimizes the worst error.

    `max_normalized_error` is the largest per-cluster Euclidean error under
    the best matching, in units of the minimum true separation.
    `per_cluster_sq[h]` is the squared error of estimated centroid h against
    its matched true centroid `permutation[h]`.
    """

    max_normalized_error: float
    per_cluster_sq: np.ndarray
    permutation: tuple[int, ...]


def centroid_error(centroids_hat, true_centroids, delta_sep: float) -> CentroidErrorResult:
    hat = np.asarray(centroids_hat, dtype=float)
    true = np.asarray(true_centroids, dtype=float)
    if hat.shape != true.shape or hat.ndim != 2:
        raise ValueError(f"centroid shape mismatch: {hat.shape} vs {true.shape}")
    if not delta_sep > 0:
        raise ValueError(f"delta_sep must be > 0, got {delta_sep}")
    k = hat.shape[0]
    if k > MAX_BRUTE_FORCE_K:
        raise ValueError(
            f"matching is exhaustive and supports k <= {MAX_BRUTE_FORCE_K}, got k={k}"
        )
    diff = hat[:, None, :] - true[None, :, :]
    sq = (diff * diff).sum(axis=2)
    best_max = math.inf
    best_perm: tuple[int, ...] = tuple(range(k))
    for perm in itertools.permutations(range(k)):
        worst = max(sq[h, perm[h]] for h in range(k))
        if worst < best_max:
            best_max = worst
            best_perm = perm
    per_cluster = sq[np.arange(k), best_perm]
    return CentroidErrorResult(
        max_normalized_error=float(math.sqrt(best_max) / delta_sep),
        per_cluster_sq=per_cluster,
        permutation=best_perm,
    )


@dataclass
class Diagnostics:
    """Summary quantities for one clustering of one dataset.

    `worst_cluster_accuracy` is the smallest, over true clusters g, of the
    correctly-labelled count of g divided by either the true size of g or
    the total assigned to g (outliers included), whichever is smaller.
    `worst_cluster_mislabeling` is the analogous worst-case error rate; the
    two satisfy accuracy + mislabeling = 1 exactly when no outliers are
    present.
    """

    worst_cluster_accuracy: float
    worst_cluster_mislabeling: float
    worst_centroid_error: float
    min_cluster_fraction: float
    min_separation: float
    snr: float


def diagnostics(
    conf: ConfusionCounts,
    centroid_err: CentroidErrorResult,
    dataset: Dataset,
) -> Diagnostics:
    k = conf.counts.shape[0]
    diag = np.diag(conf.counts)
    assigned = conf.assigned_total

    def ratio(num, den):
        return num / den if den > 0 else 0.0

    accuracy = min(
        min(ratio(diag[g], conf.true_sizes[g]), ratio(diag[g], assigned[g]))
        for g in range(k)
    )
    wrong_into = conf.assigned_true - diag
    wrong_out_of = conf.true_sizes - diag
    mislabeling = max(
        max(ratio(wrong_into[h], assigned[h]), ratio(wrong_out_of[h], conf.true_sizes[h]))
        for h in range(k)
    )
    return Diagnostics(
        worst_cluster_accuracy=float(accuracy),
        worst_cluster_mislabeling=float(mislabeling),
        worst_centroid_error=centroid_err.max_normalized_error,
        min_cluster_fraction=dataset.min_cluster_fraction,
        min_separation=dataset.delta,
        snr=dataset.snr,
    )


def confidence_interval(samples) -> tuple[float, float]:
    """Mean and 95% half-width (1.96 * sample sd / sqrt(n), n-1 denominator)."""
    arr = np.asarray(samples, dtype=float)
    if arr.size < 2:
        raise ValueError("confidence interval needs at least 2 samples")
    mean = float(arr.mean())
    half = float(1.96 * arr.std(ddof=1) / math.sqrt(arr.size))
    return mean, half
