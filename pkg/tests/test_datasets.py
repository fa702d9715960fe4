"""Tests for synthetic generation, CSV ingestion, splitting and standardization."""

import json

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from tests.conftest import toy_split
from xaibench.datasets import (
    DatasetError,
    FeatureKind,
    FeatureSchema,
    SynthConfig,
    generate_synthetic,
    inverse_standardize,
    load_csv,
    load_csv_pair,
    load_dataset,
    place_cluster_centers,
    save_dataset,
    split,
    standardize,
)


def _all_rows(dataset):
    """Features and labels in instance-id order."""
    ids = np.concatenate([dataset.train_ids, dataset.test_ids])
    X = np.vstack([dataset.train_X, dataset.test_X])
    y = np.concatenate([dataset.train_y, dataset.test_y])
    order = np.argsort(ids)
    return X[order], y[order]


class TestClusterCenters:
    """Placement of Gaussian cluster centers."""

    def test_two_clusters_two_dims(self) -> None:
        """K=2, d=2 puts centers on both axes."""
        np.testing.assert_array_equal(place_cluster_centers(2, 2, 6.0), [[6, 0], [0, 6]])

    def test_wraps_to_next_shell(self) -> None:
        """Clusters beyond d move out to 2 * kappa."""
        np.testing.assert_array_equal(
            place_cluster_centers(4, 2, 6.0), [[6, 0], [0, 6], [12, 0], [0, 12]]
        )

    def test_single_cluster(self) -> None:
        """One cluster is a scaled unit vector."""
        np.testing.assert_array_equal(place_cluster_centers(1, 3, 1.0), [[1, 0, 0]])

    @pytest.mark.parametrize("kappa", [0.5, 1.0, 6.0])
    @pytest.mark.parametrize("d", [2, 3, 5, 8, 20])
    def test_pairwise_separation(self, d, kappa) -> None:
        """With K <= d every pair of centers is at least kappa * sqrt(2) apart."""
        for K in range(1, d + 1):
            centers = place_cluster_centers(K, d, kappa)
            i, j = np.triu_indices(K, k=1)
            dist = np.linalg.norm(centers[i] - centers[j], axis=1)
            assert (dist >= kappa * np.sqrt(2) - 1e-12).all()

    @pytest.mark.parametrize("K,d", [(3, 2), (7, 3), (25, 4), (41, 20)])
    def test_distinct_beyond_d(self, K, d) -> None:
        """Wrapped shells never reuse a center."""
        centers = place_cluster_centers(K, d, 6.0)
        assert len({tuple(c) for c in centers}) == K

    def test_invalid_kappa(self) -> None:
        """Non-positive distance is rejected."""
        with pytest.raises(DatasetError):
            place_cluster_centers(2, 2, 0.0)


class TestSyntheticGenerator:
    """Gaussian-cluster datasets with known explanations."""

    def test_defaults_are_balanced(self, default_synth) -> None:
        """Default parameters give 1000 x 20 rows with exactly 500 positives."""
        dataset, truth = default_synth
        X, y = _all_rows(dataset)
        assert X.shape == (1000, 20)
        assert int(y.sum()) == 500
        assert truth.masks.shape == (10, 20)
        assert truth.cluster_index.shape == (1000,)

    def test_split_sizes(self, default_synth) -> None:
        """test_size 0.25 leaves 750 train rows."""
        dataset, _ = default_synth
        assert len(dataset.train_y) == 750
        assert len(dataset.test_y) == 250

    def test_same_seed_identical(self) -> None:
        """Two generations with one seed agree bit for bit."""
        cfg = SynthConfig(n_samples=100, dim=5, n_clusters=3, seed=9)
        a, ta = generate_synthetic(cfg)
        b, tb = generate_synthetic(cfg)
        np.testing.assert_array_equal(a.train_X, b.train_X)
        np.testing.assert_array_equal(a.test_y, b.test_y)
        np.testing.assert_array_equal(ta.weights, tb.weights)
        np.testing.assert_array_equal(ta.masks, tb.masks)

    def test_different_seed_differs(self) -> None:
        """Changing the seed changes the data."""
        a, _ = generate_synthetic(SynthConfig(n_samples=100, dim=5, n_clusters=3, seed=1))
        b, _ = generate_synthetic(SynthConfig(n_samples=100, dim=5, n_clusters=3, seed=2))
        assert not np.array_equal(a.train_X, b.train_X)

    def test_masks_never_empty(self) -> None:
        """Every cluster keeps at least one active feature even at low sparsity."""
        _, truth = generate_synthetic(SynthConfig(n_samples=50, dim=4, n_clusters=8, sparsity=0.1))
        assert (truth.masks.sum(axis=1) >= 1).all()

    @pytest.mark.parametrize("p", [0.1, 0.25, 0.5])
    def test_mask_density_matches_sparsity(self, p) -> None:
        """The share of active mask entries is within three binomial standard errors of p."""
        _, truth = generate_synthetic(SynthConfig(n_samples=20, dim=50, n_clusters=200, sparsity=p))
        n = truth.masks.size
        assert abs(truth.masks.mean() - p) <= 3 * np.sqrt(p * (1 - p) / n)

    def test_weights_within_bounds(self, default_synth) -> None:
        """Cluster weights are drawn from [lower, upper)."""
        _, truth = default_synth
        assert truth.weights.min() >= -1.0
        assert truth.weights.max() < 1.0

    def test_nearest_center_recovery(self) -> None:
        """Almost every point is closest to its own cluster center."""
        cfg = SynthConfig(n_samples=20000, seed=5)
        dataset, truth = generate_synthetic(cfg)
        X, _ = _all_rows(dataset)
        dist = ((X[:, None, :] - truth.centers[None, :, :]) ** 2).sum(axis=2)
        recovered = np.mean(np.argmin(dist, axis=1) == truth.cluster_index)
        assert recovered >= 0.999

    def test_labels_follow_ground_truth_logit(self, small_synth) -> None:
        """Positive labels are exactly the instances above the median logit."""
        dataset, truth = small_synth
        X, y = _all_rows(dataset)
        logits = np.einsum("ij,ij->i", truth.importance, X)
        np.testing.assert_array_equal(y, (logits > np.median(logits)).astype(int))

    def test_scalar_sigma_scales_spread(self) -> None:
        """A covariance scale of 4 doubles the within-cluster spread."""
        base = dict(n_samples=4000, dim=3, n_clusters=1, seed=2)
        a, ta = generate_synthetic(SynthConfig(**base))
        b, _ = generate_synthetic(SynthConfig(**base, sigma=4.0))
        Xa, _ = _all_rows(a)
        Xb, _ = _all_rows(b)
        ratio = (Xb - ta.centers[0]).std() / (Xa - ta.centers[0]).std()
        assert ratio == pytest.approx(2.0, rel=1e-9)

    def test_full_covariance_accepted(self) -> None:
        """A full symmetric positive-definite matrix is factorised."""
        sigma = [[1.0, 0.5], [0.5, 1.0]]
        dataset, _ = generate_synthetic(
            SynthConfig(n_samples=4000, dim=2, n_clusters=1, sigma=sigma, seed=3)
        )
        X, _ = _all_rows(dataset)
        assert np.corrcoef(X.T)[0, 1] == pytest.approx(0.5, abs=0.05)

    def test_invalid_sigma_matrix(self) -> None:
        """A matrix of the wrong size fails validation."""
        with pytest.raises(ValidationError):
            SynthConfig(dim=3, sigma=[[1.0, 0.0], [0.0, 1.0]])

    def test_not_positive_definite(self) -> None:
        """An indefinite covariance raises a dataset error."""
        with pytest.raises(DatasetError):
            generate_synthetic(SynthConfig(dim=2, n_clusters=1, sigma=[[1.0, 2.0], [2.0, 1.0]]))


class TestSplit:
    """Seeded train/test partitioning."""

    def test_seventy_thirty(self) -> None:
        """n=10 at 0.7 gives 7 train and 3 test rows."""
        ds = split(np.arange(20.0).reshape(10, 2), np.arange(10) % 2, 0.7, seed=0)
        assert len(ds.train_y) == 7
        assert len(ds.test_y) == 3

    def test_partition(self) -> None:
        """Train and test ids are disjoint and cover every row."""
        ds = split(np.zeros((100, 1)), np.arange(100) % 2, 0.5, seed=4)
        ids = np.concatenate([ds.train_ids, ds.test_ids])
        assert sorted(ids.tolist()) == list(range(100))
        assert not set(ds.train_ids) & set(ds.test_ids)

    def test_deterministic(self) -> None:
        """The same seed gives the same split."""
        X, y = np.arange(60.0).reshape(30, 2), np.arange(30) % 2
        a, b = split(X, y, 0.6, seed=8), split(X, y, 0.6, seed=8)
        np.testing.assert_array_equal(a.train_ids, b.train_ids)

    def test_rows_follow_ids(self) -> None:
        """Each row keeps its own features."""
        X = np.arange(10.0)[:, None]
        ds = split(X, np.arange(10) % 2, 0.7, seed=1)
        np.testing.assert_array_equal(ds.train_X[:, 0], ds.train_ids)

    def test_empty_side_rejected(self) -> None:
        """A ratio leaving no test rows is an error."""
        with pytest.raises(DatasetError):
            split(np.zeros((3, 1)), np.array([0, 1, 0]), 0.99, seed=0)


class TestStandardize:
    """Train-fitted z-scoring."""

    def test_two_point_column(self) -> None:
        """A train column [0, 2] maps to [-1, 1]."""
        ds = toy_split(np.array([[0.0], [2.0], [7.0]]), np.array([0, 1, 0]), n_train=2)
        out = standardize(ds)
        np.testing.assert_allclose(out.train_X[:, 0], [-1.0, 1.0])
        np.testing.assert_allclose(out.test_X[:, 0], [6.0])

    def test_binary_untouched(self) -> None:
        """Discrete-binary columns keep their 0/1 values."""
        schema = [
            FeatureSchema("a"),
            FeatureSchema("b", kind=FeatureKind.DISCRETE_BINARY),
        ]
        X = np.array([[1.0, 0.0], [2.0, 1.0], [3.0, 1.0], [4.0, 0.0]])
        ds = split(X, np.array([0, 1, 0, 1]), 0.5, seed=0, schema=schema)
        out = standardize(ds)
        np.testing.assert_array_equal(out.train_X[:, 1], ds.train_X[:, 1])
        np.testing.assert_array_equal(out.test_X[:, 1], ds.test_X[:, 1])

    def test_round_trip(self, rng) -> None:
        """Inverse standardization recovers the raw values."""
        X = rng.normal(3.0, 2.0, size=(50, 4))
        ds = split(X, np.arange(50) % 2, 0.7, seed=2)
        back = inverse_standardize(standardize(ds))
        np.testing.assert_allclose(back.train_X, ds.train_X, atol=1e-12)
        np.testing.assert_allclose(back.test_X, ds.test_X, atol=1e-12)

    def test_zero_variance_column(self, caplog) -> None:
        """A constant column is centred, kept finite and logged."""
        X = np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0], [5.0, 4.0]])
        ds = split(X, np.array([0, 1, 0, 1]), 0.5, seed=0)
        out = standardize(ds)
        np.testing.assert_array_equal(out.train_X[:, 0], [0.0, 0.0])
        assert "zero variance" in caplog.text

    def test_twice_is_an_error(self) -> None:
        """Standardizing an already scaled split fails."""
        ds = standardize(split(np.arange(8.0)[:, None], np.arange(8) % 2, 0.5, seed=0))
        with pytest.raises(DatasetError):
            standardize(ds)


class TestCsvLoader:
    """CSV ingestion with kind inference."""

    def test_kind_inference(self, tmp_path) -> None:
        """A 0/1 column is binary and a real-valued column is continuous."""
        path = tmp_path / "toy.csv"
        path.write_text("flag,amount,label\n0,1.5,0\n1,2.5,1\n1,0.5,0\n0,3.5,1\n")
        ds = load_csv(path, test_size=0.5, seed=0)
        assert [f.kind for f in ds.schema] == [FeatureKind.DISCRETE_BINARY, FeatureKind.CONTINUOUS]

    def test_missing_target(self, tmp_path) -> None:
        """A file without the target column is rejected."""
        path = tmp_path / "toy.csv"
        path.write_text("a,b\n1,2\n3,4\n")
        with pytest.raises(DatasetError, match="label"):
            load_csv(path)

    def test_non_binary_target(self, tmp_path) -> None:
        """Three label values are rejected."""
        path = tmp_path / "toy.csv"
        path.write_text("a,label\n1,0\n2,1\n3,2\n4,1\n")
        with pytest.raises(DatasetError, match="binary"):
            load_csv(path)

    def test_non_numeric_cell_named(self, tmp_path) -> None:
        """A text value in a continuous column is reported."""
        path = tmp_path / "toy.csv"
        path.write_text("a,label\n1.0,0\n2.0,1\nabc,0\n4.0,1\n")
        with pytest.raises(DatasetError, match="abc"):
            load_csv(path, hints={"a": "continuous"})

    def test_german_credit_shape(self, tmp_path, rng) -> None:
        """A 1000 x 20 table yields 20 features and a 70/30 split."""
        frame = pd.DataFrame(rng.normal(size=(1000, 20)), columns=[f"f{j}" for j in range(20)])
        frame["credit_risk"] = rng.integers(0, 2, size=1000)
        path = tmp_path / "german.csv"
        frame.to_csv(path, index=False)
        ds = load_csv(path, target="credit_risk", seed=1)
        assert ds.n_features == 20
        assert len(ds.train_y) == 700
        assert ds.scaler is not None

    def test_protected_column_flagged(self, tmp_path) -> None:
        """The protected attribute is marked in the schema."""
        path = tmp_path / "toy.csv"
        path.write_text("sex,x,label\nF,1.0,0\nM,2.0,1\nF,3.0,0\nM,4.0,1\n")
        ds = load_csv(path, protected="sex", test_size=0.5)
        assert ds.protected_index == 0

    def test_predetermined_split(self, tmp_path) -> None:
        """Train and test files are kept as given."""
        (tmp_path / "train.csv").write_text("a,label\n1.0,0\n2.0,1\n3.0,0\n")
        (tmp_path / "test.csv").write_text("a,label\n4.0,1\n5.0,0\n")
        ds = load_csv_pair(tmp_path / "train.csv", tmp_path / "test.csv", scale=False)
        np.testing.assert_array_equal(ds.train_X[:, 0], [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(ds.test_X[:, 0], [4.0, 5.0])


class TestStorage:
    """Generated datasets on disk."""

    def test_save_load(self, tmp_path, small_synth) -> None:
        """Saved files load back to the same arrays and ground truth."""
        dataset, truth = small_synth
        save_dataset(dataset, tmp_path, truth)
        back, back_truth = load_dataset(tmp_path)
        np.testing.assert_array_equal(back.train_X, dataset.train_X)
        np.testing.assert_array_equal(back.test_ids, dataset.test_ids)
        np.testing.assert_array_equal(back_truth.importance, truth.importance)

    def test_byte_identical(self, tmp_path) -> None:
        """Generating with one seed twice writes identical files."""
        cfg = SynthConfig(n_samples=60, dim=3, n_clusters=2, seed=7)
        for name in ("a", "b"):
            dataset, truth = generate_synthetic(cfg)
            save_dataset(dataset, tmp_path / name, truth)
        for f in ("train.csv", "test.csv", "schema.json", "ground_truth.json"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
        assert json.loads((tmp_path / "a" / "schema.json").read_text())["name"] == "synthetic"
