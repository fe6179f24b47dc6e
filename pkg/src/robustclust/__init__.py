"""Outlier-robust k-clustering and a Monte-Carlo mislabeling benchmark harness.

The library implements three nearest-centroid algorithms as (labeling
metric, centroid estimator) pairs -- classic Lloyd k-means, L1 k-medians,
and the hybrid variant that labels with Euclidean distance but re-fits
centroids with the coordinatewise median -- together with synthetic
contaminated Gaussian mixtures and the benchmark regimes that compare the
algorithms' mislabeling under adversarial outliers.
"""

__version__ = "0.1.0"

from .algorithms import (
    KMEANS,
    KMEDIANS_HYBRID,
    KMEDIANS_L1,
    OMNISCIENT_INIT,
    PRESETS,
    RANDOM_INIT,
    AlgorithmSpec,
    ClusteringResult,
    InitStrategy,
    centroid_shift,
    estimate_step,
    initialize,
    label_step,
    preset,
    provided_init,
    run,
)
from .core import (
    CentroidEstimator,
    Metric,
    coordinatewise_mean,
    coordinatewise_median,
    distance,
    median_scalar,
    order_statistic,
)
from .datagen import (
    OUTLIER_LABEL,
    Dataset,
    MixtureConfig,
    OutlierConfig,
    append_outlier_points,
    derived_rng,
    generate_centroids,
    generate_mixture,
    inject_outliers,
    min_separation,
    outlier_center_at_radius,
    read_dataset_csv,
    sample_sphere_surface,
    snr,
    write_dataset_csv,
)
from .experiments import (
    DEFAULT_SWEEPS,
    L1DemoResult,
    RegimeRow,
    RegimeSpec,
    RegimeTable,
    run_decay_curve,
    run_l1_demo,
    run_regime,
    run_regime_dimension,
    run_regime_outlier_location,
    run_regime_outlier_proportion,
    run_regime_outlier_variance,
    write_demo_csv,
    write_regime_csv,
)
from .metrics import (
    CentroidErrorResult,
    ConfusionCounts,
    Diagnostics,
    centroid_error,
    confidence_interval,
    confusion,
    diagnostics,
    mislabeling_aligned,
    mislabeling_raw,
)
