"""Shared fixtures: small synthetic datasets, trained models and toy models."""

from __future__ import annotations

import numpy as np
import pytest

from xaibench.datasets import DatasetSplit, FeatureSchema, GroundTruth, SynthConfig, generate_synthetic
from xaibench.models import (
    LinearModel,
    MlpModel,
    Model,
    TrainConfig,
    train_logistic,
    train_mlp,
)
from xaibench.models.base import ClassIndex


class LinearScoreModel(Model):
    """Identity-link model whose class-1 score is v . x + c.

    Class 0 scores the negation, so the predicted class is 1 wherever the
    score is positive. Scores are not probabilities; explainers only use them
    through ``class_probability`` and ``input_gradient``.
    """

    family = "score"

    def __init__(self, v: np.ndarray, c: float = 0.0):
        v = np.asarray(v, dtype=float)
        super().__init__(v.shape[0], 2)
        self.v, self.c = v, c

    def logits(self, x: np.ndarray) -> np.ndarray:
        batch, single = self._as_batch(x)
        s = batch @ self.v + self.c
        z = np.stack([-s, s], axis=1)
        return z[0] if single else z

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return self.logits(x)

    def input_gradient(self, x: np.ndarray, target: ClassIndex) -> np.ndarray:
        batch, single = self._as_batch(x)
        rows = self._class_rows(target, batch.shape[0])
        g = np.where(rows[:, None] == 1, self.v[None, :], -self.v[None, :])
        return g[0] if single else g

    def representation(self, x: np.ndarray) -> np.ndarray:
        return self.logits(x)

    def parameters(self) -> dict[str, np.ndarray]:
        return {"v": self.v}


class ConstantModel(Model):
    """Predicts the same probabilities everywhere."""

    family = "constant"

    def __init__(self, d: int, p1: float = 0.7):
        super().__init__(d, 2)
        self.p1 = p1

    def logits(self, x: np.ndarray) -> np.ndarray:
        batch, single = self._as_batch(x)
        z = np.tile(np.log([1.0 - self.p1, self.p1]), (batch.shape[0], 1))
        return z[0] if single else z

    def input_gradient(self, x: np.ndarray, target: ClassIndex) -> np.ndarray:
        batch, single = self._as_batch(x)
        g = np.zeros_like(batch)
        return g[0] if single else g

    def representation(self, x: np.ndarray) -> np.ndarray:
        return self.logits(x)

    def parameters(self) -> dict[str, np.ndarray]:
        return {}


def toy_split(X: np.ndarray, y: np.ndarray, n_train: int | None = None) -> DatasetSplit:
    n = X.shape[0]
    n_train = n if n_train is None else n_train
    ids = np.arange(n)
    return DatasetSplit(
        train_X=X[:n_train].copy(),
        train_y=y[:n_train].copy(),
        test_X=X[n_train:].copy() if n_train < n else X[:1].copy(),
        test_y=y[n_train:].copy() if n_train < n else y[:1].copy(),
        schema=tuple(FeatureSchema(name=f"x{j}") for j in range(X.shape[1])),
        train_ids=ids[:n_train],
        test_ids=ids[n_train:] if n_train < n else ids[:1],
        name="toy",
    )


@pytest.fixture(scope="session")
def small_synth() -> tuple[DatasetSplit, GroundTruth]:
    cfg = SynthConfig(n_samples=240, dim=6, n_clusters=4, seed=11)
    return generate_synthetic(cfg)


@pytest.fixture(scope="session")
def default_synth() -> tuple[DatasetSplit, GroundTruth]:
    return generate_synthetic(SynthConfig())


@pytest.fixture(scope="session")
def small_lr(small_synth: tuple[DatasetSplit, GroundTruth]) -> LinearModel:
    split, _ = small_synth
    model = train_logistic(split, TrainConfig(epochs=20, seed=3)).model
    assert isinstance(model, LinearModel)
    return model


@pytest.fixture(scope="session")
def small_mlp(small_synth: tuple[DatasetSplit, GroundTruth]) -> MlpModel:
    split, _ = small_synth
    model = train_mlp(split, TrainConfig(epochs=10, seed=3)).model
    assert isinstance(model, MlpModel)
    return model


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
