"""Seedable synthetic data: spherical Gaussian mixtures with planted outliers.

Cluster centroids are drawn uniformly from the surface of a sphere, each
cluster contributes isotropic Gaussian points around its centroid, and an
optional contamination step appends Gaussian outliers that the clustering
algorithms cannot distinguish from true points.  Every generator call is
driven by an explicit ``numpy.random.Generator`` so datasets are exactly
reproducible from (config, seed).
"""

from __future__ import annotations

import csv
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

OUTLIER_LABEL = -1

_MASK64 = 0xFFFFFFFFFFFFFFFF


def derived_rng(master_seed: int, *keys) -> np.random.Generator:
    """Generator for one unit of Monte-Carlo work.

    The stream depends only on the master seed plus the identifying keys
    (e.g. regime name, sweep value, repetition index), so repetitions are
    mutually independent, individually replayable, and unaffected by the
    order in which sibling cells run.  Keys may be ints, floats (keyed by
    their IEEE-754 bit pattern) or strings (keyed by CRC-32).
    """
    words = [int(master_seed) & _MASK64]
    for key in keys:
        if isinstance(key, str):
            words.append(zlib.crc32(key.encode("utf-8")))
        elif isinstance(key, (int, np.integer)):
            words.append(int(key) & _MASK64)
        else:
            words.append(int(np.float64(key).view(np.uint64)))
    return np.random.default_rng(words)


@dataclass(frozen=True)
class MixtureConfig:
    """Shape of one synthetic mixture: k clusters in d dimensions.

    `cluster_sizes` overrides the per-cluster count when clusters should be
    unequal; by default every cluster has `points_per_cluster` points.
    """

    k: int
    d: int
    sigma: float
    points_per_cluster: int
    centroid_radius: float = 5.0
    cluster_sizes: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.points_per_cluster < 1:
            raise ValueError(
                f"points_per_cluster must be >= 1, got {self.points_per_cluster}"
            )
        if not self.centroid_radius > 0:
            raise ValueError(
                f"centroid_radius must be > 0, got {self.centroid_radius}"
            )
        if self.cluster_sizes is not None:
            sizes = tuple(int(s) for s in self.cluster_sizes)
            object.__setattr__(self, "cluster_sizes", sizes)
            if len(sizes) != self.k:
                raise ValueError("cluster_sizes must list one size per cluster")
            if any(s < 1 for s in sizes):
                raise ValueError("cluster_sizes entries must be >= 1")

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.cluster_sizes or (self.points_per_cluster,) * self.k

    @property
    def n_true(self) -> int:
        return sum(self.sizes)


@dataclass(frozen=True)
class OutlierConfig:
    """Gaussian contamination: `count` points around `center` with scale `sigma_out`."""

    count: int
    center: tuple[float, ...]
    sigma_out: float

    def __post_init__(self):
        if self.count < 0:
            raise ValueError(f"count must be >= 0, got {self.count}")
        if not self.sigma_out > 0:
            raise ValueError(f"sigma_out must be > 0, got {self.sigma_out}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if len(self.center) == 0:
            raise ValueError("center must be a non-empty vector")


@dataclass
class Dataset:
    """Points plus ground truth for one synthetic instance.

    `truth[i]` is the generating cluster in [0, k) for true points and
    OUTLIER_LABEL (-1) for planted outliers.  `true_centroids` is None for
    datasets loaded from CSV without provenance, in which case quantities
    derived from the truth (min separation, SNR) are unavailable.
    """

    points: np.ndarray
    truth: np.ndarray
    true_centroids: np.ndarray | None = None
    mixture: MixtureConfig | None = None
    outlier_config: OutlierConfig | None = None
    seed: int | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.truth = np.asarray(self.truth, dtype=int)
        if self.points.ndim != 2 or self.points.shape[0] == 0:
            raise ValueError("points must be a non-empty (n, d) array")
        if self.truth.shape != (self.points.shape[0],):
            raise ValueError("truth must have one label per point")
        if self.true_centroids is not None:
            self.true_centroids = np.asarray(self.true_centroids, dtype=float)
            if (
                self.true_centroids.ndim != 2
                or self.true_centroids.shape[1] != self.points.shape[1]
            ):
                raise ValueError("true_centroids must be (k, d) with matching d")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def k(self) -> int:
        if self.true_centroids is not None:
            return self.true_centroids.shape[0]
        labels = self.truth[self.truth != OUTLIER_LABEL]
        if labels.size == 0:
            raise ValueError("cannot infer k: dataset has no labelled true points")
        return int(labels.max()) + 1

    @property
    def is_outlier(self) -> np.ndarray:
        return self.truth == OUTLIER_LABEL

    @property
    def n_outliers(self) -> int:
        return int(self.is_outlier.sum())

    @property
    def n_true(self) -> int:
        return self.n - self.n_outliers

    @property
    def true_sizes(self) -> np.ndarray:
        return np.bincount(self.truth[~self.is_outlier], minlength=self.k)

    @property
    def min_cluster_fraction(self) -> float:
        """Smallest true-cluster size as a fraction of the true (non-outlier) points."""
        return float(self.true_sizes.min() / self.n_true)

    @property
    def delta(self) -> float:
        """Minimum pairwise separation of the true centroids."""
        if self.true_centroids is None:
            raise ValueError("dataset has no true centroids")
        return min_separation(self.true_centroids)

    @property
    def snr(self) -> float:
        if self.mixture is None:
            raise ValueError("dataset has no mixture config")
        return snr(self.delta, self.mixture.sigma)


def sample_sphere_surface(d: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the surface of the radius-`radius` sphere in d dimensions.

    Normalizes a standard Gaussian vector; the measure-zero all-zeros draw
    is rejected and redrawn.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if not radius > 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    while True:
        v = rng.standard_normal(d)
        norm = np.linalg.norm(v)
        if norm > 0:
            # dividing first keeps the d=1 case exact: x/|x| is exactly +-1
            return radius * (v / norm)


def generate_centroids(k: int, d: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """k independent sphere-surface draws, stacked as a (k, d) array."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    return np.stack([sample_sphere_surface(d, radius, rng) for _ in range(k)])


def generate_mixture(
    config: MixtureConfig,
    rng: np.random.Generator,
    centroids: np.ndarray | None = None,
    seed: int | None = None,
) -> Dataset:
    """Draw a mixture dataset with no outliers.

    Centroids come from `generate_centroids` unless given explicitly (in
    which case `centroid_radius` is only provenance).  Points are laid out
    cluster by cluster: cluster h contributes its points as one contiguous
    block of `centroid + sigma * standard normal` draws.
    """
    if centroids is None:
        centroids = generate_centroids(config.k, config.d, config.centroid_radius, rng)
    else:
        centroids = np.asarray(centroids, dtype=float)
        if centroids.shape != (config.k, config.d):
            raise ValueError(
                f"centroids shape {centroids.shape} does not match (k={config.k}, d={config.d})"
            )
    sizes = config.sizes
    blocks = [
        centroids[h] + config.sigma * rng.standard_normal((sizes[h], config.d))
        for h in range(config.k)
    ]
    points = np.concatenate(blocks, axis=0)
    truth = np.repeat(np.arange(config.k), sizes)
    return Dataset(points, truth, centroids, config, None, seed)


def append_outlier_points(
    dataset: Dataset,
    outlier_points: np.ndarray,
    config: OutlierConfig | None = None,
) -> Dataset:
    """Append arbitrary points flagged as outliers; the original data is untouched.

    This is the general contamination hook: the caller may place the extra
    points anywhere (e.g. after inspecting the data).
    """
    extra = np.asarray(outlier_points, dtype=float)
    if extra.size == 0:
        extra = extra.reshape(0, dataset.d)
    if extra.ndim != 2 or extra.shape[1] != dataset.d:
        raise ValueError(
            f"outlier points must be (m, {dataset.d}), got shape {extra.shape}"
        )
    points = np.concatenate([dataset.points, extra], axis=0)
    truth = np.concatenate([dataset.truth, np.full(extra.shape[0], OUTLIER_LABEL)])
    return Dataset(
        points, truth, dataset.true_centroids, dataset.mixture, config, dataset.seed
    )


def inject_outliers(
    dataset: Dataset, config: OutlierConfig, rng: np.random.Generator
) -> Dataset:
    """Append `config.count` Gaussian outliers around `config.center`."""
    if dataset.n_outliers:
        raise ValueError("dataset already contains outliers")
    center = np.asarray(config.center, dtype=float)
    if center.shape != (dataset.d,):
        raise ValueError(
            f"outlier center has dimension {center.shape}, dataset d={dataset.d}"
        )
    extra = center + config.sigma_out * rng.standard_normal((config.count, dataset.d))
    return append_outlier_points(dataset, extra, config)


def outlier_center_at_radius(d: int, norm: float, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random direction scaled to exactly `norm` (the zero vector for norm 0).

    The direction is drawn even when norm is 0 so the generator stream is
    consumed identically across sweep values.
    """
    if norm < 0:
        raise ValueError(f"norm must be >= 0, got {norm}")
    direction = sample_sphere_surface(d, 1.0, rng)
    return norm * direction


def min_separation(centroids) -> float:
    """Minimum pairwise Euclidean distance among the centroids."""
    c = np.asarray(centroids, dtype=float)
    if c.ndim != 2 or c.shape[0] < 2:
        raise ValueError("min_separation needs at least 2 centroids")
    diff = c[:, None, :] - c[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    iu = np.triu_indices(c.shape[0], k=1)
    return float(dist[iu].min())


def snr(delta: float, sigma: float) -> float:
    """Signal-to-noise ratio: minimum separation over twice the noise scale."""
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    return delta / (2.0 * sigma)


def write_dataset_csv(dataset: Dataset, path) -> None:
    """Write `point_id,coord_0..coord_{d-1},truth` rows (truth -1 marks outliers)."""
    path = Path(path)
    header = ["point_id"] + [f"coord_{j}" for j in range(dataset.d)] + ["truth"]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(dataset.n):
            coords = [f"{float(v):.17g}" for v in dataset.points[i]]
            writer.writerow([i, *coords, int(dataset.truth[i])])


def read_dataset_csv(path) -> Dataset:
    """Load a dataset written by `write_dataset_csv` (no provenance attached)."""
    path = Path(path)
    with path.open("r", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "point_id" or header[-1] != "truth":
            raise ValueError(f"{path}: not a dataset CSV (bad header)")
        d = len(header) - 2
        points, truth = [], []
        for row in reader:
            if len(row) != d + 2:
                raise ValueError(f"{path}: row has {len(row)} fields, expected {d + 2}")
            points.append([float(v) for v in row[1 : 1 + d]])
            truth.append(int(row[-1]))
    if not points:
        raise ValueError(f"{path}: dataset CSV has no data rows")
    return Dataset(np.array(points), np.array(truth))
