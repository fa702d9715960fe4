# Copyright(c) Microsoft Corporation.
# Licensed under the MIT License.

"""Records describing XAI-ready tabular datasets."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np


class DatasetError(Exception):
    """Raised when a dataset cannot be generated, parsed, fetched or split."""

    pass


class FeatureKind(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE_BINARY = "discrete-binary"


@dataclass(frozen=True)
class FeatureSchema:
    name: str
    kind: FeatureKind = FeatureKind.CONTINUOUS
    protected: bool = False
    # Raw values mapped to 0 and 1, for binary columns that were not 0/1 on disk.
    levels: Optional[tuple[str, str]] = None

    @property
    def is_binary(self) -> bool:
        return self.kind is FeatureKind.DISCRETE_BINARY

    def to_dict(self) -> dict:
        out: dict = {"name": self.name, "kind": self.kind.value, "protected": self.protected}
        if self.levels is not None:
            out["levels"] = list(self.levels)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> FeatureSchema:
        levels = data.get("levels")
        return cls(
            name=str(data["name"]),
            kind=FeatureKind(data.get("kind", FeatureKind.CONTINUOUS.value)),
            protected=bool(data.get("protected", False)),
            levels=tuple(levels) if levels is not None else None,  # type: ignore[arg-type]
        )


def validate_schema(schema: Sequence[FeatureSchema]) -> None:
    """Check that at most one feature is marked protected."""
    protected = [f.name for f in schema if f.protected]
    if len(protected) > 1:
        raise DatasetError(f"At most one protected feature allowed, got {protected}")


@dataclass(frozen=True)
class Scaler:
    """Per-feature (mean, std) pairs fitted on the train split.

    Discrete-binary columns carry mean 0 and std 1 so the transform is the
    identity on them.
    """

    mean: np.ndarray
    std: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.std

    def inverse_transform(self, X: np.ndarray) -> np.ndarray:
        return X * self.std + self.mean


@dataclass(frozen=True)
class DatasetSplit:
    train_X: np.ndarray
    train_y: np.ndarray
    test_X: np.ndarray
    test_y: np.ndarray
    schema: tuple[FeatureSchema, ...]
    # Stable instance ids (row positions before splitting).
    train_ids: np.ndarray
    test_ids: np.ndarray
    scaler: Optional[Scaler] = None
    name: str = "dataset"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        d = len(self.schema)
        for label, X, y, ids in (
            ("train", self.train_X, self.train_y, self.train_ids),
            ("test", self.test_X, self.test_y, self.test_ids),
        ):
            if X.ndim != 2 or X.shape[1] != d:
                raise DatasetError(
                    f"{label} matrix has shape {X.shape}, expected (n, {d})"
                )
            if len(y) != X.shape[0] or len(ids) != X.shape[0]:
                raise DatasetError(f"{label} labels/ids do not match row count")
            if len(y) and not np.isin(y, (0, 1)).all():
                raise DatasetError(f"{label} labels must be binary")
        validate_schema(self.schema)
        for arr in (self.train_X, self.train_y, self.test_X, self.test_y):
            arr.setflags(write=False)

    @property
    def n_features(self) -> int:
        return len(self.schema)

    @property
    def feature_names(self) -> list[str]:
        return [f.name for f in self.schema]

    @property
    def binary_mask(self) -> np.ndarray:
        return np.array([f.is_binary for f in self.schema], dtype=bool)

    @property
    def protected_index(self) -> Optional[int]:
        for j, f in enumerate(self.schema):
            if f.protected:
                return j
        return None

    def with_scaler(
        self, train_X: np.ndarray, test_X: np.ndarray, scaler: Optional[Scaler]
    ) -> DatasetSplit:
        return replace(self, train_X=train_X, test_X=test_X, scaler=scaler)


@dataclass(frozen=True)
class GroundTruth:
    """Per-cluster masks and weights plus per-instance cluster membership.

    Rows are indexed by instance id, i.e. the order in which instances were
    generated before any split.
    """

    masks: np.ndarray  # K x d, {0, 1}
    weights: np.ndarray  # K x d
    cluster_index: np.ndarray  # n
    centers: Optional[np.ndarray] = None  # K x d

    def __post_init__(self) -> None:
        if (self.masks.sum(axis=1) == 0).any():
            raise DatasetError("Every cluster mask needs at least one active feature")

    @property
    def n_clusters(self) -> int:
        return int(self.masks.shape[0])

    @property
    def cluster_importance(self) -> np.ndarray:
        """Signed importance m_k * w_k for each cluster (K x d)."""
        return self.masks * self.weights

    @property
    def importance(self) -> np.ndarray:
        """Signed importance for every instance (n x d)."""
        return self.cluster_importance[self.cluster_index]

    def for_instances(self, ids: Sequence[int] | np.ndarray) -> np.ndarray:
        return self.importance[np.asarray(ids, dtype=np.int64)]

    def cluster_of(self, ids: Sequence[int] | np.ndarray) -> np.ndarray:
        return self.cluster_index[np.asarray(ids, dtype=np.int64)]

    def to_dict(self) -> dict:
        out = {
            "masks": self.masks.astype(int).tolist(),
            "weights": self.weights.tolist(),
            "cluster_index": self.cluster_index.astype(int).tolist(),
        }
        if self.centers is not None:
            out["centers"] = self.centers.tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> GroundTruth:
        centers = data.get("centers")
        return cls(
            masks=np.asarray(data["masks"], dtype=float),
            weights=np.asarray(data["weights"], dtype=float),
            cluster_index=np.asarray(data["cluster_index"], dtype=np.int64),
            centers=np.asarray(centers, dtype=float) if centers is not None else None,
        )
