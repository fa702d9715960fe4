# Copyright(c) Microsoft Corporation.
# Licensed under the MIT License.

"""Gaussian-cluster synthetic datasets with known ground-truth explanations.

Each instance is drawn from one of K Gaussian clusters. Every cluster has a
sparse binary mask m_k and a weight vector w_k; the label of an instance is
driven by the logit (m_k * w_k) . x, so m_k * w_k is the ground-truth
explanation for every instance of cluster k.
"""

from __future__ import annotations

import logging
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.linalg import cholesky
from scipy.special import expit

from ..util.rng import child_generator, gaussian
from .preprocessing import split
from .schema import DatasetError, DatasetSplit, FeatureSchema, GroundTruth

logger = logging.getLogger(__name__)

MAX_MASK_REDRAWS = 100


class SynthConfig(BaseModel):
    """Parameters of the generator; defaults reproduce params_gauss."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_samples: int = Field(default=1000, ge=2)
    dim: int = Field(default=20, ge=1)
    n_clusters: int = Field(default=10, ge=1)
    distance_to_center: float = Field(default=6.0, gt=0)
    lower_weight: float = -1.0
    upper_weight: float = 1.0
    sparsity: float = Field(default=0.25, gt=0, le=1)
    # None: identity; scalar s: s * I; matrix: full covariance shared by clusters.
    sigma: Optional[Union[float, list[list[float]]]] = None
    test_size: float = Field(default=0.25, gt=0, lt=1)
    seed: int = Field(default=564, ge=0, lt=2**64)

    @field_validator("sigma")
    @classmethod
    def _check_sigma(
        cls, value: Optional[Union[float, list[list[float]]]]
    ) -> Optional[Union[float, list[list[float]]]]:
        if isinstance(value, (int, float)) and value <= 0:
            raise ValueError("sigma scale must be positive")
        return value

    @model_validator(mode="after")
    def _check_bounds(self) -> SynthConfig:
        if not self.lower_weight < self.upper_weight:
            raise ValueError("lower_weight must be smaller than upper_weight")
        if isinstance(self.sigma, list):
            matrix = np.asarray(self.sigma, dtype=float)
            if matrix.shape != (self.dim, self.dim):
                raise ValueError(
                    f"sigma matrix must be {self.dim}x{self.dim}, got {matrix.shape}"
                )
        return self


def place_cluster_centers(n_clusters: int, dim: int, kappa: float) -> np.ndarray:
    """Cluster i sits at (i // d + 1) * kappa along axis i mod d."""
    if n_clusters < 1 or dim < 1:
        raise DatasetError("Need at least one cluster and one dimension")
    if kappa <= 0:
        raise DatasetError(f"distance_to_center must be positive, got {kappa}")
    centers = np.zeros((n_clusters, dim))
    for i in range(n_clusters):
        centers[i, i % dim] = (i // dim + 1) * kappa
    return centers


def _covariance_factor(config: SynthConfig) -> Optional[np.ndarray]:
    if config.sigma is None:
        return None
    if isinstance(config.sigma, (int, float)):
        return np.sqrt(float(config.sigma)) * np.eye(config.dim)
    try:
        return cholesky(np.asarray(config.sigma, dtype=float), lower=True)
    except np.linalg.LinAlgError as e:
        raise DatasetError("sigma must be symmetric positive definite") from e


def _draw_masks(config: SynthConfig) -> np.ndarray:
    rng = child_generator(config.seed, "masks")
    masks = np.zeros((config.n_clusters, config.dim))
    for k in range(config.n_clusters):
        for _ in range(MAX_MASK_REDRAWS):
            row = (rng.random(config.dim) < config.sparsity).astype(float)
            if row.any():
                masks[k] = row
                break
        else:
            raise DatasetError(
                f"Mask of cluster {k} stayed all-zero after {MAX_MASK_REDRAWS} "
                f"draws; raise sparsity (currently {config.sparsity})"
            )
    return masks


def generate_synthetic(config: SynthConfig) -> tuple[DatasetSplit, GroundTruth]:
    """Generate a balanced binary dataset and its ground-truth explanations.

    Labels are 1 exactly when the class probability exceeds the median
    probability, which gives n/2 positives for even n. The threshold is
    applied to the logits; the sigmoid is monotone so the labels are the same,
    and saturated probabilities cannot create ties.
    """
    n, d, K = config.n_samples, config.dim, config.n_clusters
    centers = place_cluster_centers(K, d, config.distance_to_center)

    weights = config.lower_weight + (
        config.upper_weight - config.lower_weight
    ) * child_generator(config.seed, "weights").random((K, d))
    masks = _draw_masks(config)
    cluster_index = child_generator(config.seed, "clusters").integers(0, K, size=n)

    noise = gaussian(child_generator(config.seed, "noise"), (n, d))
    factor = _covariance_factor(config)
    if factor is not None:
        noise = noise @ factor.T
    X = centers[cluster_index] + noise

    importance = (masks * weights)[cluster_index]
    logits = np.einsum("ij,ij->i", importance, X)
    probabilities = expit(logits)
    y = (logits > np.median(logits)).astype(np.int64)

    truth = GroundTruth(
        masks=masks, weights=weights, cluster_index=cluster_index, centers=centers
    )
    schema = [FeatureSchema(name=f"x{j}") for j in range(d)]
    dataset = split(
        X, y, ratio=1.0 - config.test_size, seed=config.seed, schema=schema,
        name="synthetic",
    )
    dataset.metadata.update(
        {
            "generator": "gaussian-clusters",
            "config": config.model_dump(),
            "positives": int(y.sum()),
            "mean_probability": float(probabilities.mean()),
            "standardized": False,
        }
    )
    logger.info(
        f"Generated synthetic dataset: n={n}, d={d}, K={K}, "
        f"{int(y.sum())} positives, {len(dataset.train_y)} train rows"
    )
    return dataset, truth
