import itertools
import math

import numpy as np
import pytest

from robustclust.datagen import (
    OUTLIER_LABEL,
    MixtureConfig,
    OutlierConfig,
    generate_mixture,
    inject_outliers,
)
from robustclust.metrics import (
    centroid_error,
    confidence_interval,
    confusion,
    diagnostics,
    mislabeling_aligned,
    mislabeling_raw,
)


class TestConfusion:
    def test_perfect_labeling_is_diagonal(self):
        truth = np.repeat([0, 1, 2], 5)
        conf = confusion(truth, truth, 3)
        np.testing.assert_array_equal(conf.counts, np.diag([5, 5, 5]))
        np.testing.assert_array_equal(conf.true_sizes, [5, 5, 5])
        np.testing.assert_array_equal(conf.assigned_outliers, [0, 0, 0])

    def test_everything_in_one_cluster(self):
        truth = np.repeat([0, 1], 5)
        labels = np.zeros(10, dtype=int)
        conf = confusion(labels, truth, 2)
        assert conf.counts[0, 0] == 5
        assert conf.counts[1, 0] == 5
        assert conf.counts[:, 1].sum() == 0

    def test_outliers_tallied_separately(self):
        truth = np.array([0, 0, 1, 1, OUTLIER_LABEL, OUTLIER_LABEL, OUTLIER_LABEL])
        labels = np.array([0, 0, 1, 1, 1, 1, 1])
        conf = confusion(labels, truth, 2)
        np.testing.assert_array_equal(conf.counts, [[2, 0], [0, 2]])
        np.testing.assert_array_equal(conf.assigned_outliers, [0, 3])
        np.testing.assert_array_equal(conf.assigned_total, [2, 5])

    def test_row_sums_equal_true_sizes_on_random_instances(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            k = int(rng.integers(2, 5))
            n = int(rng.integers(k, 60))
            truth = rng.integers(0, k, size=n)
            truth[rng.random(n) < 0.2] = OUTLIER_LABEL
            labels = rng.integers(0, k, size=n)
            conf = confusion(labels, truth, k)
            expected = np.bincount(truth[truth != OUTLIER_LABEL], minlength=k)
            np.testing.assert_array_equal(conf.counts.sum(axis=1), expected)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            confusion([0, 3], [0, 1], 2)


class TestMislabelingRaw:
    def test_zero_when_equal(self):
        truth = np.repeat([0, 1], 10)
        assert mislabeling_raw(truth, truth) == 0.0

    def test_one_wrong_of_400(self):
        truth = np.repeat(np.arange(4), 100)
        labels = truth.copy()
        labels[0] = 1
        assert mislabeling_raw(labels, truth) == pytest.approx(0.0025)

    def test_outlier_labels_never_counted(self):
        truth = np.array([0, 1, OUTLIER_LABEL])
        labels = np.array([0, 1, 0])
        flipped = np.array([0, 1, 1])
        assert mislabeling_raw(labels, truth) == mislabeling_raw(flipped, truth) == 0.0

    def test_needs_a_true_point(self):
        with pytest.raises(ValueError, match="non-outlier"):
            mislabeling_raw([0], [OUTLIER_LABEL])


def _oracle_aligned(labels_hat, truth, k):
    """Definition-level oracle: try every relabeling of the estimated clusters."""
    labels_hat = np.asarray(labels_hat)
    truth = np.asarray(truth)
    mask = truth != OUTLIER_LABEL
    best = math.inf
    best_perm = None
    for perm in itertools.permutations(range(k)):
        relabeled = np.array([perm[l] for l in labels_hat])
        mp = float(np.mean(relabeled[mask] != truth[mask]))
        if mp < best - 1e-15:
            best = mp
            best_perm = perm
    return best, best_perm


class TestMislabelingAligned:
    def test_swapped_clusters_align_to_zero(self):
        truth = np.repeat([0, 1, 2], 4)
        labels = truth.copy()
        labels[truth == 0] = 1
        labels[truth == 1] = 0
        mp, perm = mislabeling_aligned(labels, truth, 3)
        assert mp == 0.0
        assert perm == (1, 0, 2)

    def test_identity_optimal_equals_raw(self):
        rng = np.random.default_rng(1)
        truth = np.repeat([0, 1], 20)
        labels = truth.copy()
        labels[rng.choice(40, size=3, replace=False)] = 1 - truth[:3]
        mp, perm = mislabeling_aligned(labels, truth, 2)
        assert mp == mislabeling_raw(labels, truth)
        assert perm == (0, 1)

    def test_matches_definition_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(60):
            k = int(rng.integers(2, 4))
            n = int(rng.integers(k, 31))
            truth = rng.integers(0, k, size=n)
            labels = rng.integers(0, k, size=n)
            got_mp, got_perm = mislabeling_aligned(labels, truth, k)
            want_mp, _ = _oracle_aligned(labels, truth, k)
            assert got_mp == pytest.approx(want_mp, abs=1e-12)
            relabeled = np.array([got_perm[l] for l in labels])
            assert mislabeling_raw(relabeled, truth) == pytest.approx(got_mp, abs=1e-12)

    def test_aligned_never_exceeds_raw(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            truth = rng.integers(0, 3, size=30)
            labels = rng.integers(0, 3, size=30)
            mp_aligned, _ = mislabeling_aligned(labels, truth, 3)
            assert mp_aligned <= mislabeling_raw(labels, truth) + 1e-12

    def test_invariant_under_relabeling(self):
        rng = np.random.default_rng(4)
        truth = rng.integers(0, 3, size=40)
        labels = rng.integers(0, 3, size=40)
        base, _ = mislabeling_aligned(labels, truth, 3)
        for perm in itertools.permutations(range(3)):
            relabeled = np.array([perm[l] for l in labels])
            got, _ = mislabeling_aligned(relabeled, truth, 3)
            assert got == pytest.approx(base, abs=1e-12)

    def test_rejects_large_k(self):
        with pytest.raises(ValueError, match="k <= 10"):
            mislabeling_aligned(np.zeros(5, dtype=int), np.zeros(5, dtype=int), 11)


class TestCentroidError:
    def test_exact_centroids(self):
        c = np.arange(6.0).reshape(3, 2)
        res = centroid_error(c, c, delta_sep=2.0)
        assert res.max_normalized_error == 0.0
        np.testing.assert_array_equal(res.per_cluster_sq, [0, 0, 0])

    def test_half_separation_offset(self):
        true = np.array([[0.0, 0.0], [4.0, 0.0]])
        hat = np.array([[0.0, 2.0], [4.0, 0.0]])
        res = centroid_error(hat, true, delta_sep=4.0)
        assert res.max_normalized_error == pytest.approx(0.5)

    def test_swapped_perfect_centroids(self):
        true = np.array([[0.0, 0.0], [4.0, 0.0]])
        res = centroid_error(true[::-1], true, delta_sep=4.0)
        assert res.max_normalized_error == 0.0
        assert res.permutation == (1, 0)

    def test_invariant_under_permutation_of_either_list(self):
        rng = np.random.default_rng(5)
        true = rng.normal(size=(4, 3))
        hat = true + 0.1 * rng.normal(size=(4, 3))
        base = centroid_error(hat, true, 1.0).max_normalized_error
        for perm in itertools.permutations(range(4)):
            p = list(perm)
            assert centroid_error(hat[p], true, 1.0).max_normalized_error == pytest.approx(base)
            assert centroid_error(hat, true[p], 1.0).max_normalized_error == pytest.approx(base)

    def test_rejects_bad_delta(self):
        c = np.zeros((2, 2))
        with pytest.raises(ValueError, match="delta_sep"):
            centroid_error(c, c, 0.0)


class TestDiagnostics:
    def _dataset(self, seed=6, n_out=0):
        rng = np.random.default_rng(seed)
        ds = generate_mixture(MixtureConfig(k=4, d=3, sigma=1.0, points_per_cluster=100), rng)
        if n_out:
            ds = inject_outliers(ds, OutlierConfig(n_out, (0.0,) * 3, 5.0), rng)
        return ds

    def test_perfect_clustering(self):
        ds = self._dataset()
        conf = confusion(ds.truth, ds.truth, 4)
        err = centroid_error(ds.true_centroids, ds.true_centroids, ds.delta)
        diag = diagnostics(conf, err, ds)
        assert diag.worst_cluster_accuracy == 1.0
        assert diag.worst_cluster_mislabeling == 0.0
        assert diag.worst_centroid_error == 0.0
        assert diag.min_cluster_fraction == 0.25
        assert diag.snr == ds.snr

    def test_accuracy_mislabeling_identity_without_outliers(self):
        rng = np.random.default_rng(7)
        ds = self._dataset()
        err = centroid_error(ds.true_centroids, ds.true_centroids, ds.delta)
        for _ in range(20):
            labels = rng.integers(0, 4, size=ds.n)
            diag = diagnostics(confusion(labels, ds.truth, 4), err, ds)
            assert diag.worst_cluster_mislabeling == pytest.approx(
                1.0 - diag.worst_cluster_accuracy, abs=1e-12
            )

    def test_outliers_can_only_reduce_accuracy(self):
        rng = np.random.default_rng(8)
        ds_out = self._dataset(n_out=60)
        err = centroid_error(ds_out.true_centroids, ds_out.true_centroids, ds_out.delta)
        true_mask = ~ds_out.is_outlier
        for _ in range(20):
            labels = rng.integers(0, 4, size=ds_out.n)
            with_out = diagnostics(confusion(labels, ds_out.truth, 4), err, ds_out)
            conf_no_out = confusion(labels[true_mask], ds_out.truth[true_mask], 4)
            without = diagnostics(conf_no_out, err, ds_out)
            assert with_out.worst_cluster_accuracy <= without.worst_cluster_accuracy + 1e-12


class TestConfidenceInterval:
    def test_constant_samples(self):
        mean, half = confidence_interval([0.5] * 10)
        assert mean == 0.5
        assert half == 0.0

    def test_two_point_sample(self):
        mean, half = confidence_interval([0.0, 1.0])
        assert mean == 0.5
        assert half == pytest.approx(0.98, rel=1e-12)

    def test_bernoulli_concentration(self):
        rng = np.random.default_rng(9)
        draws = (rng.random(5000) < 0.2).astype(float)
        mean, half = confidence_interval(draws)
        assert abs(mean - 0.2) < 0.02
        assert half == pytest.approx(1.96 * draws.std(ddof=1) / math.sqrt(5000))

    def test_needs_two_samples(self):
        with pytest.raises(ValueError, match="at least 2"):
            confidence_interval([1.0])
