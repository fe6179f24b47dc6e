import math

import numpy as np
import pytest

from robustclust.datagen import (
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


class TestSphereSampling:
    def test_d1_is_a_sign_flip(self):
        rng = np.random.default_rng(0)
        draws = {sample_sphere_surface(1, 5.0, rng)[0] for _ in range(200)}
        assert draws == {-5.0, 5.0}

    def test_norm_constraint(self):
        rng = np.random.default_rng(1)
        v = sample_sphere_surface(10, 5.0, rng)
        assert abs(np.linalg.norm(v) - 5.0) < 1e-9 * 5.0

    def test_symmetry_monte_carlo(self):
        # spherical symmetry: the empirical mean of many draws is near the origin
        rng = np.random.default_rng(2)
        draws = np.array([sample_sphere_surface(3, 5.0, rng) for _ in range(100_000)])
        assert np.all(np.abs(draws.mean(axis=0)) < 0.05)

    def test_invalid_args(self):
        rng = np.random.default_rng(3)
        with pytest.raises(ValueError, match="d must be"):
            sample_sphere_surface(0, 5.0, rng)
        with pytest.raises(ValueError, match="radius"):
            sample_sphere_surface(3, 0.0, rng)


class TestGenerateCentroids:
    def test_d1_values(self):
        rng = np.random.default_rng(4)
        c = generate_centroids(2, 1, 5.0, rng)
        assert set(np.abs(c.ravel())) == {5.0}

    def test_four_centroids_norms(self):
        rng = np.random.default_rng(5)
        c = generate_centroids(4, 10, 5.0, rng)
        assert c.shape == (4, 10)
        np.testing.assert_allclose(np.linalg.norm(c, axis=1), 5.0, rtol=1e-12)

    def test_separation_bounded_by_diameter(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            c = generate_centroids(4, 3, 5.0, rng)
            assert min_separation(c) <= 2 * 5.0


class TestGenerateMixture:
    def test_sizes_and_truth_counts(self):
        rng = np.random.default_rng(7)
        ds = generate_mixture(MixtureConfig(k=4, d=10, sigma=2.0, points_per_cluster=100), rng)
        assert ds.n == 400
        np.testing.assert_array_equal(ds.true_sizes, [100, 100, 100, 100])
        assert ds.n_outliers == 0

    def test_degenerate_sigma_collapses_onto_centroids(self):
        rng = np.random.default_rng(8)
        ds = generate_mixture(MixtureConfig(k=3, d=4, sigma=1e-12, points_per_cluster=20), rng)
        for h in range(3):
            pts = ds.points[ds.truth == h]
            assert np.max(np.linalg.norm(pts - ds.true_centroids[h], axis=1)) < 1e-9

    def test_determinism(self):
        config = MixtureConfig(k=2, d=3, sigma=1.0, points_per_cluster=10)
        a = generate_mixture(config, np.random.default_rng(99))
        b = generate_mixture(config, np.random.default_rng(99))
        np.testing.assert_array_equal(a.points, b.points)
        np.testing.assert_array_equal(a.truth, b.truth)
        np.testing.assert_array_equal(a.true_centroids, b.true_centroids)

    def test_unequal_cluster_sizes(self):
        rng = np.random.default_rng(10)
        config = MixtureConfig(k=3, d=2, sigma=1.0, points_per_cluster=5,
                               cluster_sizes=(5, 7, 9))
        ds = generate_mixture(config, rng)
        np.testing.assert_array_equal(ds.true_sizes, [5, 7, 9])
        assert ds.min_cluster_fraction == 5 / 21

    def test_marginals_match_the_model(self):
        # large-sample check: per-cluster coordinate means and variances
        rng = np.random.default_rng(11)
        sigma, n = 2.0, 10_000
        config = MixtureConfig(k=2, d=3, sigma=sigma, points_per_cluster=n)
        ds = generate_mixture(config, rng)
        for h in range(2):
            pts = ds.points[ds.truth == h]
            tol = 4 * sigma / math.sqrt(n)
            assert np.all(np.abs(pts.mean(axis=0) - ds.true_centroids[h]) < tol)
            var = pts.var(axis=0, ddof=1)
            assert np.all(np.abs(var - sigma**2) < 0.2 * sigma**2)

    def test_config_validation_names_fields(self):
        with pytest.raises(ValueError, match="d must be"):
            MixtureConfig(k=2, d=0, sigma=1.0, points_per_cluster=5)
        with pytest.raises(ValueError, match="k must be"):
            MixtureConfig(k=1, d=2, sigma=1.0, points_per_cluster=5)
        with pytest.raises(ValueError, match="sigma must be"):
            MixtureConfig(k=2, d=2, sigma=0.0, points_per_cluster=5)


class TestInjectOutliers:
    def _base(self, seed=12):
        rng = np.random.default_rng(seed)
        ds = generate_mixture(MixtureConfig(k=2, d=10, sigma=1.0, points_per_cluster=30), rng)
        return ds, rng

    def test_zero_count_keeps_points(self):
        ds, rng = self._base()
        out = inject_outliers(ds, OutlierConfig(0, (0.0,) * 10, 10.0), rng)
        np.testing.assert_array_equal(out.points, ds.points)
        np.testing.assert_array_equal(out.truth, ds.truth)

    def test_appends_marked_outliers(self):
        ds, rng = self._base()
        out = inject_outliers(ds, OutlierConfig(60, (0.0,) * 10, 10.0), rng)
        assert out.n == ds.n + 60
        assert out.n_outliers == 60
        np.testing.assert_array_equal(out.truth[: ds.n], ds.truth)
        assert np.all(out.truth[ds.n :] == OUTLIER_LABEL)

    def test_degenerate_sigma_out(self):
        ds, rng = self._base()
        center = (3.0,) * 10
        out = inject_outliers(ds, OutlierConfig(5, center, 1e-12), rng)
        extra = out.points[out.is_outlier]
        assert np.max(np.linalg.norm(extra - np.array(center), axis=1)) < 1e-9

    def test_originals_never_mutated(self):
        ds, rng = self._base()
        points_before = ds.points.copy()
        truth_before = ds.truth.copy()
        inject_outliers(ds, OutlierConfig(10, (0.0,) * 10, 5.0), rng)
        np.testing.assert_array_equal(ds.points, points_before)
        np.testing.assert_array_equal(ds.truth, truth_before)

    def test_rejects_double_injection(self):
        ds, rng = self._base()
        out = inject_outliers(ds, OutlierConfig(5, (0.0,) * 10, 5.0), rng)
        with pytest.raises(ValueError, match="already contains outliers"):
            inject_outliers(out, OutlierConfig(5, (0.0,) * 10, 5.0), rng)

    def test_dimension_mismatch(self):
        ds, rng = self._base()
        with pytest.raises(ValueError, match="dimension"):
            inject_outliers(ds, OutlierConfig(5, (0.0,) * 3, 5.0), rng)

    def test_arbitrary_placement_hook(self):
        ds, _ = self._base()
        planted = np.full((3, 10), 1e6)
        out = append_outlier_points(ds, planted)
        assert out.n_outliers == 3
        np.testing.assert_array_equal(out.points[-3:], planted)


class TestOutlierCenter:
    def test_zero_norm(self):
        rng = np.random.default_rng(13)
        np.testing.assert_array_equal(outlier_center_at_radius(10, 0.0, rng), np.zeros(10))

    def test_norm_100(self):
        rng = np.random.default_rng(14)
        v = outlier_center_at_radius(10, 100.0, rng)
        assert abs(np.linalg.norm(v) - 100.0) < 1e-9 * 100.0

    def test_determinism(self):
        a = outlier_center_at_radius(5, 7.0, np.random.default_rng(15))
        b = outlier_center_at_radius(5, 7.0, np.random.default_rng(15))
        np.testing.assert_array_equal(a, b)


class TestSeparationAndSnr:
    def test_min_separation_345(self):
        assert min_separation([(0, 0), (3, 4)]) == 5.0

    def test_min_separation_takes_pairwise_minimum(self):
        assert min_separation([(0, 0), (3, 4), (0, 1)]) == 1.0

    def test_min_separation_antipodal_demo_centroids(self):
        assert min_separation([(5, -6), (-5, 6)]) == pytest.approx(math.sqrt(244))

    def test_min_separation_needs_two(self):
        with pytest.raises(ValueError):
            min_separation([(1.0, 2.0)])

    def test_snr_values(self):
        assert snr(math.sqrt(244), 10.0) == pytest.approx(0.7810249675906654)
        assert snr(0.0, 3.0) == 0.0
        assert snr(4.0, 1.0) == 2.0

    def test_snr_rejects_bad_sigma(self):
        with pytest.raises(ValueError, match="sigma"):
            snr(1.0, 0.0)


class TestDerivedRng:
    def test_same_keys_same_stream(self):
        a = derived_rng(7, "regime", 2.5, 3).standard_normal(5)
        b = derived_rng(7, "regime", 2.5, 3).standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_repetitions_get_distinct_streams(self):
        a = derived_rng(7, "regime", 2.5, 0).standard_normal(5)
        b = derived_rng(7, "regime", 2.5, 1).standard_normal(5)
        assert not np.array_equal(a, b)

    def test_key_types_matter_but_are_stable(self):
        a = derived_rng(7, 1.0).standard_normal(3)
        b = derived_rng(7, 1.0).standard_normal(3)
        np.testing.assert_array_equal(a, b)


class TestDatasetCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(16)
        ds = generate_mixture(MixtureConfig(k=2, d=3, sigma=1.0, points_per_cluster=8), rng)
        ds = inject_outliers(ds, OutlierConfig(4, (0.0, 0.0, 0.0), 5.0), rng)
        path = tmp_path / "data.csv"
        write_dataset_csv(ds, path)
        loaded = read_dataset_csv(path)
        np.testing.assert_array_equal(loaded.points, ds.points)
        np.testing.assert_array_equal(loaded.truth, ds.truth)

    def test_header_and_row_count(self, tmp_path):
        rng = np.random.default_rng(17)
        ds = generate_mixture(MixtureConfig(k=2, d=2, sigma=1.0, points_per_cluster=3), rng)
        path = tmp_path / "data.csv"
        write_dataset_csv(ds, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "point_id,coord_0,coord_1,truth"
        assert len(lines) == 1 + ds.n

    def test_write_is_deterministic(self, tmp_path):
        config = MixtureConfig(k=2, d=2, sigma=1.0, points_per_cluster=5)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_dataset_csv(generate_mixture(config, np.random.default_rng(18)), p1)
        write_dataset_csv(generate_mixture(config, np.random.default_rng(18)), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("nope\n1,2\n")
        with pytest.raises(ValueError, match="header"):
            read_dataset_csv(path)


class TestDatasetInvariants:
    def test_truth_length_must_match(self):
        with pytest.raises(ValueError, match="one label per point"):
            Dataset(np.zeros((3, 2)), np.zeros(2, dtype=int))

    def test_outlier_bookkeeping(self):
        rng = np.random.default_rng(19)
        ds = generate_mixture(MixtureConfig(k=4, d=2, sigma=1.0, points_per_cluster=10), rng)
        ds = inject_outliers(ds, OutlierConfig(7, (0.0, 0.0), 2.0), rng)
        assert ds.n == 4 * 10 + 7
        assert ds.n_outliers == 7
        assert ds.n_true == 40
        assert set(ds.truth[~ds.is_outlier]) == {0, 1, 2, 3}
