"""Train/test splitting and train-fitted standardization."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from typing import Optional

import numpy as np

from ..util.rng import child_generator
from .schema import DatasetError, DatasetSplit, FeatureSchema, Scaler

logger = logging.getLogger(__name__)


def train_count(n: int, ratio: float) -> int:
    """Number of train rows, ceil(ratio * n), robust to binary rounding."""
    return int(math.ceil(round(ratio * n, 9)))


def split(
    X: np.ndarray,
    y: np.ndarray,
    ratio: float,
    seed: int,
    schema: Optional[Sequence[FeatureSchema]] = None,
    ids: Optional[np.ndarray] = None,
    name: str = "dataset",
) -> DatasetSplit:
    """Randomly partition rows into train (ceil(ratio * n) rows) and test.

    ``ids`` are the stable instance ids carried along with the rows; they
    default to the row positions.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    if n < 2:
        raise DatasetError(f"Cannot split {n} row(s); need at least 2")
    if not 0.0 < ratio < 1.0:
        raise DatasetError(f"Split ratio must lie in (0, 1), got {ratio}")
    n_train = train_count(n, ratio)
    if n_train < 1 or n_train > n - 1:
        raise DatasetError(
            f"Split ratio {ratio} on {n} rows leaves an empty side ({n_train} train)"
        )

    if ids is None:
        ids = np.arange(n, dtype=np.int64)
    if schema is None:
        schema = [FeatureSchema(name=f"x{j}") for j in range(X.shape[1])]

    order = child_generator(seed, "split").permutation(n)
    train_rows, test_rows = order[:n_train], order[n_train:]
    return DatasetSplit(
        train_X=X[train_rows].copy(),
        train_y=y[train_rows].copy(),
        test_X=X[test_rows].copy(),
        test_y=y[test_rows].copy(),
        schema=tuple(schema),
        train_ids=np.asarray(ids)[train_rows].copy(),
        test_ids=np.asarray(ids)[test_rows].copy(),
        name=name,
    )


def standardize(dataset: DatasetSplit) -> DatasetSplit:
    """Z-score continuous columns with train statistics.

    Discrete-binary columns are left untouched. A zero-variance continuous
    column keeps std 1 (it is only centred) and a warning is logged.
    """
    if dataset.scaler is not None:
        raise DatasetError(f"Dataset {dataset.name!r} is already standardized")

    binary = dataset.binary_mask
    mean = dataset.train_X.mean(axis=0)
    std = dataset.train_X.std(axis=0)

    for j in np.flatnonzero((std == 0.0) & ~binary):
        logger.warning(
            f"Feature {dataset.schema[j].name!r} has zero variance on the train "
            "split; clamping its std to 1"
        )
    std = np.where(std == 0.0, 1.0, std)
    mean = np.where(binary, 0.0, mean)
    std = np.where(binary, 1.0, std)

    scaler = Scaler(mean=mean, std=std)
    return dataset.with_scaler(
        scaler.transform(dataset.train_X), scaler.transform(dataset.test_X), scaler
    )


def inverse_standardize(dataset: DatasetSplit) -> DatasetSplit:
    """Undo :func:`standardize`, returning raw feature values."""
    if dataset.scaler is None:
        raise DatasetError(f"Dataset {dataset.name!r} is not standardized")
    scaler = dataset.scaler
    return dataset.with_scaler(
        scaler.inverse_transform(dataset.train_X),
        scaler.inverse_transform(dataset.test_X),
        None,
    )
