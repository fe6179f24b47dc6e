"""Iterative nearest-centroid clustering with pluggable metric and estimator.

One engine covers the three algorithms compared by the benchmark harness;
they differ only in which distance drives the labeling step and which
location estimator re-fits the centroids:

* ``kmeans``       -- squared-Euclidean labeling, coordinatewise mean (Lloyd).
* ``kmedians-l1``  -- L1 labeling, coordinatewise median.
* ``hybrid``       -- Euclidean labeling, coordinatewise median.

Each full iteration is a labeling pass followed by an estimation pass; the
loop stops once the mean squared centroid movement drops to the tolerance
`eps`, or after `max_iter` iterations.  Final labels are recomputed from the
final centroids so the reported labels and centroids are mutually
consistent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    CentroidEstimator,
    Metric,
    assignment_distances,
    coordinatewise_mean,
    coordinatewise_median,
)
from .datagen import Dataset

DEFAULT_EPS = 0.001
DEFAULT_MAX_ITER = 100


@dataclass(frozen=True)
class AlgorithmSpec:
    """A clustering algorithm as a (labeling metric, centroid estimator) pair."""

    name: str
    label_metric: Metric
    estimator: CentroidEstimator


KMEANS = AlgorithmSpec("kmeans", Metric.L2_SQUARED, CentroidEstimator.COORD_MEAN)
KMEDIANS_L1 = AlgorithmSpec("kmedians-l1", Metric.L1, CentroidEstimator.COORD_MEDIAN)
KMEDIANS_HYBRID = AlgorithmSpec("hybrid", Metric.L2, CentroidEstimator.COORD_MEDIAN)

PRESETS = {spec.name: spec for spec in (KMEANS, KMEDIANS_L1, KMEDIANS_HYBRID)}


def preset(name: str) -> AlgorithmSpec:
    """Look up a named algorithm preset."""
    try:
        return PRESETS[name]
    except KeyError:
        valid = ", ".join(sorted(PRESETS))
        raise ValueError(f"unknown algorithm {name!r}; valid presets: {valid}") from None


@dataclass(frozen=True, eq=False)
class InitStrategy:
    """How the first centroids are chosen.

    kind is one of:

    * ``random``     -- k distinct data points, uniformly without replacement
                        (outliers are eligible; they are indistinguishable).
    * ``omniscient`` -- the dataset's exact true centroids.
    * ``provided``   -- explicit centroids carried by the strategy.
    """

    kind: str
    centroids: np.ndarray | None = None


RANDOM_INIT = InitStrategy("random")
OMNISCIENT_INIT = InitStrategy("omniscient")


def provided_init(centroids) -> InitStrategy:
    c = np.asarray(centroids, dtype=float)
    if c.ndim != 2 or c.shape[0] < 1:
        raise ValueError("provided centroids must be a non-empty (k, d) array")
    return InitStrategy("provided", c)


def init_strategy(name: str) -> InitStrategy:
    if name == "random":
        return RANDOM_INIT
    if name == "omniscient":
        return OMNISCIENT_INIT
    raise ValueError(f"unknown init strategy {name!r}; valid: omniscient, random")


def initialize(
    dataset: Dataset,
    strategy: InitStrategy,
    rng: np.random.Generator | None = None,
    k: int | None = None,
) -> np.ndarray:
    """Initial (k, d) centroids for a run on `dataset`."""
    if strategy.kind == "provided":
        c = strategy.centroids
        if c.shape[1] != dataset.d:
            raise ValueError(
                f"provided centroids have d={c.shape[1]}, dataset d={dataset.d}"
            )
        if k is not None and c.shape[0] != k:
            raise ValueError(f"provided centroids have k={c.shape[0]}, expected {k}")
        return c.copy()
    if strategy.kind == "omniscient":
        if dataset.true_centroids is None:
            raise ValueError("omniscient init needs a dataset with true centroids")
        if k is not None and dataset.true_centroids.shape[0] != k:
            raise ValueError(
                f"dataset has k={dataset.true_centroids.shape[0]}, expected {k}"
            )
        return dataset.true_centroids.copy()
    if strategy.kind == "random":
        if rng is None:
            raise ValueError("random init needs an rng")
        kk = dataset.k if k is None else k
        if dataset.n < kk:
            raise ValueError(f"cannot pick {kk} distinct points from {dataset.n}")
        idx = rng.choice(dataset.n, size=kk, replace=False)
        return dataset.points[idx].copy()
    raise ValueError(f"unknown init strategy kind {strategy.kind!r}")


def label_step(points, centroids, metric: Metric) -> np.ndarray:
    """Assign every point to its nearest centroid; ties go to the lowest index."""
    pts = np.asarray(points, dtype=float)
    cents = np.asarray(centroids, dtype=float)
    dists = assignment_distances(pts, cents, metric)
    return dists.argmin(axis=1)


def estimate_step(
    points,
    labels,
    k: int,
    estimator: CentroidEstimator,
    prev_centroids,
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Re-fit one centroid per cluster from its assigned points.

    A cluster with no assigned points keeps its previous centroid; the
    indices of such clusters are returned so the caller can flag the
    iteration.
    """
    pts = np.asarray(points, dtype=float)
    lab = np.asarray(labels)
    prev = np.asarray(prev_centroids, dtype=float)
    if prev.shape != (k, pts.shape[1]):
        raise ValueError(f"prev_centroids must be ({k}, {pts.shape[1]})")
    if lab.size and (lab.min() < 0 or lab.max() >= k):
        raise ValueError("labels out of range [0, k)")
    fit = (
        coordinatewise_median
        if estimator is CentroidEstimator.COORD_MEDIAN
        else coordinatewise_mean
    )
    rows = []
    empty = []
    for h in range(k):
        members = pts[lab == h]
        if members.shape[0] == 0:
            rows.append(prev[h].copy())
            empty.append(h)
        else:
            rows.append(fit(members))
    return np.stack(rows), tuple(empty)


def centroid_shift(old, new) -> float:
    """Mean squared Euclidean movement between two centroid lists."""
    o = np.asarray(old, dtype=float)
    n = np.asarray(new, dtype=float)
    if o.shape != n.shape:
        raise ValueError(f"centroid shape mismatch: {o.shape} vs {n.shape}")
    return float(((n - o) ** 2).sum(axis=1).mean())


@dataclass
class IterationTrace:
    """One full iteration: movement since the previous centroids."""

    shift: float
    empty_clusters: tuple[int, ...]
    centroids: np.ndarray


@dataclass
class ClusteringResult:
    centroids: np.ndarray
    labels: np.ndarray
    iterations: int
    converged: bool
    trace: list[IterationTrace] = field(default_factory=list)

    @property
    def shifts(self) -> list[float]:
        return [t.shift for t in self.trace]

    def to_json_dict(self) -> dict:
        return {
            "centroids": self.centroids.tolist(),
            "labels": [int(v) for v in self.labels],
            "iterations": self.iterations,
            "converged": self.converged,
            "shifts": self.shifts,
            "empty_clusters": [list(t.empty_clusters) for t in self.trace],
        }


def run(
    dataset: Dataset,
    spec: AlgorithmSpec,
    init: InitStrategy = OMNISCIENT_INIT,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    rng: np.random.Generator | None = None,
    k: int | None = None,
) -> ClusteringResult:
    """Run one clustering algorithm to convergence or the iteration cap."""
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    points = dataset.points
    theta = initialize(dataset, init, rng=rng, k=k)
    kk = theta.shape[0]
    trace: list[IterationTrace] = []
    converged = False
    while len(trace) < max_iter:
        labels = label_step(points, theta, spec.label_metric)
        new_theta, empty = estimate_step(points, labels, kk, spec.estimator, theta)
        shift = centroid_shift(theta, new_theta)
        theta = new_theta
        trace.append(IterationTrace(shift, empty, theta.copy()))
        if shift <= eps:
            converged = True
            break
    final_labels = label_step(points, theta, spec.label_metric)
    return ClusteringResult(theta, final_labels, len(trace), converged, trace)
