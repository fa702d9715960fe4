"""Prediction gaps when perturbing important (PGI) or unimportant (PGU) features."""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..models import Model
from ..util import child_generator
from .agreement import auc_over_k, top_k_indices
from .base import GAP_METRICS, MetricError, PerturbationConfig
from .perturbation import PerturbationDraw, apply_perturbations, draw_perturbations


def _gap_mask(e: np.ndarray, k: int, mode: str) -> np.ndarray:
    mask = np.zeros(e.shape[0], dtype=bool)
    mask[top_k_indices(e, k)] = True
    return mask if mode == "PGI" else ~mask


def _check(e: np.ndarray, model: Model, mode: str) -> str:
    mode = mode.upper()
    if mode not in GAP_METRICS:
        raise MetricError(f"Unknown prediction gap mode {mode!r}")
    if e.shape != (model.n_features,):
        raise MetricError(f"Explanation has shape {e.shape}, model expects {model.n_features}")
    return mode


def _gap(
    model: Model, x: np.ndarray, cls: int, y_hat: float, mask: np.ndarray,
    draw: PerturbationDraw, binary_mask: Optional[np.ndarray],
) -> float:
    if not mask.any():
        return 0.0
    neighbours = apply_perturbations(x, draw, mask, binary_mask)
    return float(np.mean(np.abs(y_hat - model.class_probability(neighbours, cls))))


def prediction_gap_curve(
    model: Model,
    x: np.ndarray,
    e: np.ndarray,
    mode: str = "PGI",
    cfg: PerturbationConfig | None = None,
    seed: int = 0,
    binary_mask: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Prediction gap for k = 1..d.

    All k share one set of draws, so the curve is exactly 0 wherever the
    perturbed set is empty.
    """
    cfg = cfg or PerturbationConfig()
    x = np.asarray(x, dtype=float)
    e = np.asarray(e, dtype=float)
    mode = _check(e, model, mode)
    cls = int(model.predict(x))
    y_hat = float(model.class_probability(x, cls))
    draw = draw_perturbations(child_generator(seed, "prediction_gap"), cfg.n_perturbations, x.shape[0], cfg)
    return np.array(
        [
            _gap(model, x, cls, y_hat, _gap_mask(e, k, mode), draw, binary_mask)
            for k in range(1, x.shape[0] + 1)
        ]
    )


def prediction_gap(
    model: Model,
    x: np.ndarray,
    e: np.ndarray,
    k: int,
    mode: str = "PGI",
    cfg: PerturbationConfig | None = None,
    seed: int = 0,
    binary_mask: Optional[np.ndarray] = None,
) -> float:
    cfg = cfg or PerturbationConfig()
    x = np.asarray(x, dtype=float)
    e = np.asarray(e, dtype=float)
    mode = _check(e, model, mode)
    if not 1 <= k <= x.shape[0]:
        raise MetricError(f"k={k} outside 1..{x.shape[0]}")
    cls = int(model.predict(x))
    y_hat = float(model.class_probability(x, cls))
    draw = draw_perturbations(child_generator(seed, "prediction_gap"), cfg.n_perturbations, x.shape[0], cfg)
    return _gap(model, x, cls, y_hat, _gap_mask(e, k, mode), draw, binary_mask)


def prediction_gap_auc(
    model: Model,
    x: np.ndarray,
    e: np.ndarray,
    mode: str = "PGI",
    cfg: PerturbationConfig | None = None,
    seed: int = 0,
    binary_mask: Optional[np.ndarray] = None,
) -> float:
    return auc_over_k(prediction_gap_curve(model, x, e, mode, cfg, seed, binary_mask))
