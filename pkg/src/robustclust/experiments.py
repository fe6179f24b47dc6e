"""Monte-Carlo benchmark harness.

Four contamination regimes compare the algorithms on 4-cluster mixtures
(100 points per cluster, centroids uniform on the radius-5 sphere), sweeping
one contamination parameter each:

==================  ===========================  ==========================
regime              sweep                        fixed contamination
==================  ===========================  ==========================
outlier_variance    outlier noise scale 1..20    60 outliers at the origin,
                                                 d=10, sigma=2
dimension           data dimension 2..20         60 outliers at the origin,
                                                 outlier scale 10, sigma=2
outlier_location    outlier center norm 0..100   40 outliers, scale 2, d=10,
                                                 sigma=1, random direction
                                                 redrawn per repetition
outlier_proportion  outlier count 0..80          outliers at the origin,
                                                 scale 10, d=10, sigma=2
==================  ===========================  ==========================

Two further experiments probe labeling behaviour without contamination: a
fixed two-cluster instance comparing L1 against L2 labeling at the true
centroids (`run_l1_demo`), and an error-decay curve over the signal-to-noise
ratio with exactly controlled antipodal centroids (`run_decay_curve`).

Every repetition derives its own generator from (master seed, regime name,
sweep value, repetition index), so cells are independent, replayable, and
unaffected by sweep order.  Within a repetition every algorithm sees the
same dataset and the same initial centroids (paired comparison).
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import metrics
from .algorithms import DEFAULT_EPS, DEFAULT_MAX_ITER, PRESETS, provided_init
from .algorithms import run as run_clustering
from .algorithms import label_step
from .core import Metric
from .datagen import (
    Dataset,
    MixtureConfig,
    OutlierConfig,
    derived_rng,
    generate_mixture,
    inject_outliers,
    outlier_center_at_radius,
)

DEFAULT_ALGORITHMS = ("kmeans", "kmedians-l1", "hybrid")
DEFAULT_REPETITIONS = 5000

REGIME_SWEEP_NAMES = {
    "outlier_variance": "sigma_out",
    "dimension": "d",
    "outlier_location": "outlier_norm",
    "outlier_proportion": "n_out",
    "decay": "snr",
}

DEFAULT_SWEEPS = {
    "outlier_variance": (1.0, 5.0, 10.0, 15.0, 20.0),
    "dimension": (2.0, 5.0, 10.0, 15.0, 20.0),
    "outlier_location": (0.0, 25.0, 50.0, 75.0, 100.0),
    "outlier_proportion": (0.0, 20.0, 40.0, 60.0, 80.0),
    "decay": (1.5, 2.0, 2.5, 3.0),
}

CONTAMINATION_REGIMES = tuple(n for n in REGIME_SWEEP_NAMES if n != "decay")

CSV_HEADER = [
    "regime",
    "sweep_name",
    "sweep_value",
    "algorithm",
    "init",
    "metric_name",
    "mean",
    "ci_half_width",
    "repetitions",
    "master_seed",
]


@dataclass(frozen=True)
class RegimeSpec:
    """One benchmark run: a regime, its sweep, and the Monte-Carlo protocol."""

    regime: str
    sweep: tuple[float, ...]
    repetitions: int = DEFAULT_REPETITIONS
    init: str = "omniscient"
    algorithms: tuple[str, ...] = DEFAULT_ALGORITHMS
    master_seed: int = 0
    eps: float = DEFAULT_EPS
    max_iter: int = DEFAULT_MAX_ITER
    # decay-only knobs; ignored by the contamination regimes
    decay_d: int = 1
    decay_points_per_cluster: int = 500

    def __post_init__(self):
        if self.regime not in REGIME_SWEEP_NAMES:
            valid = ", ".join(sorted(REGIME_SWEEP_NAMES))
            raise ValueError(f"unknown regime {self.regime!r}; valid regimes: {valid}")
        object.__setattr__(self, "sweep", tuple(float(v) for v in self.sweep))
        if len(self.sweep) == 0:
            raise ValueError("sweep must be non-empty")
        if self.repetitions < 2:
            raise ValueError(f"repetitions must be >= 2, got {self.repetitions}")
        if self.init not in ("random", "omniscient"):
            raise ValueError(f"init must be 'random' or 'omniscient', got {self.init!r}")
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        for name in self.algorithms:
            if name not in PRESETS:
                valid = ", ".join(sorted(PRESETS))
                raise ValueError(f"unknown algorithm {name!r}; valid: {valid}")
        if len(self.algorithms) == 0:
            raise ValueError("algorithms must be non-empty")
        if self.regime == "decay" and self.init != "omniscient":
            raise ValueError("the decay regime always uses omniscient init")

    @property
    def sweep_name(self) -> str:
        return REGIME_SWEEP_NAMES[self.regime]

    @property
    def mp_metric(self) -> str:
        # with omniscient (or provided) starts the cluster identities are
        # fixed by the initialization; random starts are aligned first
        return "mp_raw" if self.init == "omniscient" else "mp_aligned"


@dataclass(frozen=True)
class RegimeRow:
    """Aggregated result of one (sweep value, algorithm) cell."""

    regime: str
    sweep_name: str
    sweep_value: float
    algorithm: str
    init: str
    mp_metric: str
    mp_mean: float
    mp_ci: float
    centroid_error_mean: float
    centroid_error_ci: float
    repetitions: int
    master_seed: int


@dataclass
class RegimeTable:
    rows: list[RegimeRow]
    spec: RegimeSpec | None = None

    def cell(self, sweep_value: float, algorithm: str) -> RegimeRow:
        for row in self.rows:
            if row.sweep_value == float(sweep_value) and row.algorithm == algorithm:
                return row
        raise KeyError(f"no cell for sweep_value={sweep_value}, algorithm={algorithm}")


def _int_sweep_value(value: float, what: str) -> int:
    iv = int(value)
    if iv != value:
        raise ValueError(f"{what} sweep values must be integers, got {value}")
    return iv


def _build_outlier_variance(value, rng, spec):
    ds = generate_mixture(MixtureConfig(k=4, d=10, sigma=2.0, points_per_cluster=100), rng)
    return inject_outliers(ds, OutlierConfig(60, (0.0,) * 10, float(value)), rng)


def _build_dimension(value, rng, spec):
    d = _int_sweep_value(value, "dimension")
    ds = generate_mixture(MixtureConfig(k=4, d=d, sigma=2.0, points_per_cluster=100), rng)
    return inject_outliers(ds, OutlierConfig(60, (0.0,) * d, 10.0), rng)


def _build_outlier_location(value, rng, spec):
    ds = generate_mixture(MixtureConfig(k=4, d=10, sigma=1.0, points_per_cluster=100), rng)
    center = outlier_center_at_radius(10, float(value), rng)
    return inject_outliers(ds, OutlierConfig(40, tuple(center), 2.0), rng)


def _build_outlier_proportion(value, rng, spec):
    n_out = _int_sweep_value(value, "outlier count")
    ds = generate_mixture(MixtureConfig(k=4, d=10, sigma=2.0, points_per_cluster=100), rng)
    if n_out == 0:
        return ds
    return inject_outliers(ds, OutlierConfig(n_out, (0.0,) * 10, 10.0), rng)


def _build_decay(value, rng, spec):
    # antipodal centroids along the first axis so the separation (and hence
    # the signal-to-noise ratio) is exact rather than a random draw
    target_snr = float(value)
    if not target_snr > 0:
        raise ValueError(f"snr sweep values must be > 0, got {value}")
    d = spec.decay_d
    half = target_snr * 1.0  # sigma = 1, separation = 2 * snr
    centroids = np.zeros((2, d))
    centroids[0, 0] = half
    centroids[1, 0] = -half
    config = MixtureConfig(
        k=2,
        d=d,
        sigma=1.0,
        points_per_cluster=spec.decay_points_per_cluster,
        centroid_radius=half,
    )
    return generate_mixture(config, rng, centroids=centroids)


REGIME_BUILDERS = {
    "outlier_variance": _build_outlier_variance,
    "dimension": _build_dimension,
    "outlier_location": _build_outlier_location,
    "outlier_proportion": _build_outlier_proportion,
    "decay": _build_decay,
}


def build_regime_dataset(spec: RegimeSpec, value: float, rep: int) -> Dataset:
    """The exact dataset repetition `rep` of cell `value` sees (for replay)."""
    rng = derived_rng(spec.master_seed, spec.regime, float(value), rep)
    return REGIME_BUILDERS[spec.regime](value, rng, spec)


def _run_repetition(spec: RegimeSpec, value: float, rep: int) -> dict[str, tuple[float, float]]:
    """One repetition of one cell: every algorithm on the same data and start."""
    rng = derived_rng(spec.master_seed, spec.regime, float(value), rep)
    dataset = REGIME_BUILDERS[spec.regime](value, rng, spec)
    if spec.init == "omniscient":
        start = dataset.true_centroids
    else:
        idx = rng.choice(dataset.n, size=dataset.k, replace=False)
        start = dataset.points[idx]
    init = provided_init(start)
    delta = dataset.delta
    out = {}
    for name in spec.algorithms:
        result = run_clustering(
            dataset, PRESETS[name], init, eps=spec.eps, max_iter=spec.max_iter
        )
        if spec.init == "omniscient":
            mp = metrics.mislabeling_raw(result.labels, dataset.truth)
        else:
            mp, _ = metrics.mislabeling_aligned(result.labels, dataset.truth, dataset.k)
        err = metrics.centroid_error(result.centroids, dataset.true_centroids, delta)
        out[name] = (mp, err.max_normalized_error)
    return out


def _chunk_worker(args) -> tuple[int, list[dict[str, tuple[float, float]]]]:
    spec, value, lo, hi = args
    return lo, [_run_repetition(spec, value, rep) for rep in range(lo, hi)]


def _run_cell(spec: RegimeSpec, value: float, jobs: int = 1) -> list[RegimeRow]:
    reps = spec.repetitions
    per_rep: list[dict[str, tuple[float, float]] | None] = [None] * reps
    if jobs <= 1:
        for rep in range(reps):
            per_rep[rep] = _run_repetition(spec, value, rep)
    else:
        chunk = max(1, -(-reps // (jobs * 4)))
        tasks = [(spec, value, lo, min(lo + chunk, reps)) for lo in range(0, reps, chunk)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for lo, results in pool.map(_chunk_worker, tasks):
                per_rep[lo : lo + len(results)] = results
    rows = []
    for name in spec.algorithms:
        mps = np.array([r[name][0] for r in per_rep])
        errs = np.array([r[name][1] for r in per_rep])
        mp_mean, mp_ci = metrics.confidence_interval(mps)
        err_mean, err_ci = metrics.confidence_interval(errs)
        rows.append(
            RegimeRow(
                regime=spec.regime,
                sweep_name=spec.sweep_name,
                sweep_value=float(value),
                algorithm=name,
                init=spec.init,
                mp_metric=spec.mp_metric,
                mp_mean=mp_mean,
                mp_ci=mp_ci,
                centroid_error_mean=err_mean,
                centroid_error_ci=err_ci,
                repetitions=reps,
                master_seed=spec.master_seed,
            )
        )
    return rows


def run_regime(spec: RegimeSpec, jobs: int = 1, on_cell=None) -> RegimeTable:
    """Run every sweep cell of `spec`; `on_cell(rows)` fires as cells finish."""
    rows: list[RegimeRow] = []
    for value in spec.sweep:
        cell_rows = _run_cell(spec, value, jobs=jobs)
        rows.extend(cell_rows)
        if on_cell is not None:
            on_cell(cell_rows)
    return RegimeTable(rows, spec)


def _named_regime_runner(regime_name):
    def runner(spec: RegimeSpec, jobs: int = 1, on_cell=None) -> RegimeTable:
        if spec.regime != regime_name:
            raise ValueError(f"spec.regime is {spec.regime!r}, expected {regime_name!r}")
        return run_regime(spec, jobs=jobs, on_cell=on_cell)

    runner.__name__ = f"run_regime_{regime_name}"
    runner.__doc__ = f"Run the {regime_name} regime (see the module docstring)."
    return runner


run_regime_outlier_variance = _named_regime_runner("outlier_variance")
run_regime_dimension = _named_regime_runner("dimension")
run_regime_outlier_location = _named_regime_runner("outlier_location")
run_regime_outlier_proportion = _named_regime_runner("outlier_proportion")


def run_decay_curve(
    snr_values,
    repetitions: int,
    master_seed: int,
    d: int = 1,
    points_per_cluster: int = 500,
    algorithms: tuple[str, ...] = ("hybrid",),
    jobs: int = 1,
    on_cell=None,
) -> RegimeTable:
    """Mislabeling against exactly-controlled signal-to-noise, no outliers."""
    spec = RegimeSpec(
        regime="decay",
        sweep=tuple(snr_values),
        repetitions=repetitions,
        init="omniscient",
        algorithms=tuple(algorithms),
        master_seed=master_seed,
        decay_d=d,
        decay_points_per_cluster=points_per_cluster,
    )
    return run_regime(spec, jobs=jobs, on_cell=on_cell)


# Fixed two-cluster instance where the L1 and L2 nearest-centroid regions
# genuinely differ: centroids off the axes and off the diagonals.
DEMO_CENTROIDS = ((-5.0, 6.0), (5.0, -6.0))
DEMO_SIGMA = 10.0
DEMO_POINTS_PER_CLUSTER = 500
DEMO_REGIME = "l1_demo"


@dataclass(frozen=True)
class L1DemoResult:
    """Mean mislabeling of L1 vs L2 labeling at the true centroids."""

    mp_l1_mean: float
    mp_l1_ci: float
    mp_l2_mean: float
    mp_l2_ci: float
    repetitions: int
    master_seed: int
    sigma: float = DEMO_SIGMA
    points_per_cluster: int = DEMO_POINTS_PER_CLUSTER


def run_l1_demo(
    repetitions: int,
    master_seed: int,
    sigma: float = DEMO_SIGMA,
    points_per_cluster: int = DEMO_POINTS_PER_CLUSTER,
) -> L1DemoResult:
    """Label a fixed two-cluster mixture by its true centroids, L1 vs L2.

    No iteration is involved: each repetition draws a fresh dataset, assigns
    every point to the nearest true centroid under each metric, and records
    the two mislabeling proportions.
    """
    if repetitions < 100:
        raise ValueError(f"repetitions must be >= 100, got {repetitions}")
    centroids = np.array(DEMO_CENTROIDS)
    config = MixtureConfig(
        k=2,
        d=2,
        sigma=sigma,
        points_per_cluster=points_per_cluster,
        centroid_radius=float(np.linalg.norm(centroids[0])),
    )
    mp_l1 = np.empty(repetitions)
    mp_l2 = np.empty(repetitions)
    for rep in range(repetitions):
        rng = derived_rng(master_seed, DEMO_REGIME, rep)
        dataset = generate_mixture(config, rng, centroids=centroids)
        labels_l1 = label_step(dataset.points, centroids, Metric.L1)
        labels_l2 = label_step(dataset.points, centroids, Metric.L2)
        mp_l1[rep] = metrics.mislabeling_raw(labels_l1, dataset.truth)
        mp_l2[rep] = metrics.mislabeling_raw(labels_l2, dataset.truth)
    l1_mean, l1_ci = metrics.confidence_interval(mp_l1)
    l2_mean, l2_ci = metrics.confidence_interval(mp_l2)
    return L1DemoResult(
        mp_l1_mean=l1_mean,
        mp_l1_ci=l1_ci,
        mp_l2_mean=l2_mean,
        mp_l2_ci=l2_ci,
        repetitions=repetitions,
        master_seed=master_seed,
        sigma=sigma,
        points_per_cluster=points_per_cluster,
    )


def _fmt(value) -> str:
    return format(float(value), ".6g")


def _write_csv_lines(lines, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        writer.writerows(lines)


def regime_csv_lines(table: RegimeTable) -> list[list[str]]:
    lines = []
    for row in table.rows:
        base = [row.regime, row.sweep_name, _fmt(row.sweep_value), row.algorithm, row.init]
        tail = [str(row.repetitions), str(row.master_seed)]
        lines.append(base + [row.mp_metric, _fmt(row.mp_mean), _fmt(row.mp_ci)] + tail)
        lines.append(
            base
            + ["centroid_error", _fmt(row.centroid_error_mean), _fmt(row.centroid_error_ci)]
            + tail
        )
    return lines


def write_regime_csv(table: RegimeTable, path) -> None:
    """Long-format CSV: one line per (cell, metric), floats with 6 significant digits."""
    _write_csv_lines(regime_csv_lines(table), path)


def demo_csv_lines(result: L1DemoResult) -> list[list[str]]:
    tail = [str(result.repetitions), str(result.master_seed)]
    return [
        [DEMO_REGIME, "sigma", _fmt(result.sigma), "l1-labeling", "omniscient",
         "mp_raw", _fmt(result.mp_l1_mean), _fmt(result.mp_l1_ci)] + tail,
        [DEMO_REGIME, "sigma", _fmt(result.sigma), "l2-labeling", "omniscient",
         "mp_raw", _fmt(result.mp_l2_mean), _fmt(result.mp_l2_ci)] + tail,
    ]


def write_demo_csv(result: L1DemoResult, path) -> None:
    _write_csv_lines(demo_csv_lines(result), path)
