"""Kernel SHAP: Shapley values from a kernel-weighted regression over coalitions."""

from __future__ import annotations

import itertools
import logging
from typing import Optional

import numpy as np
from scipy.special import comb

from ..models import Model
from ..util import child_generator
from .base import ExplainContext, Explainer, ExplainerError, ShapConfig

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_FEATURES = 20
MAX_RESAMPLES = 100


def shapley_kernel_weights(masks: np.ndarray, constraint_weight: float = 1e6) -> np.ndarray:
    """(d-1) / (C(d,s) s (d-s)) per coalition; empty and full get ``constraint_weight``."""
    d = masks.shape[1]
    s = masks.sum(axis=1)
    weights = np.full(masks.shape[0], constraint_weight, dtype=float)
    inner = (s > 0) & (s < d)
    si = s[inner]
    weights[inner] = (d - 1) / (comb(d, si) * si * (d - si))
    return weights


def all_coalitions(d: int) -> np.ndarray:
    """Every proper non-empty coalition, one boolean row each."""
    if d > MAX_EXHAUSTIVE_FEATURES:
        raise ExplainerError(f"Refusing to enumerate 2^{d} coalitions")
    rows = [bits for bits in itertools.product((False, True), repeat=d) if 0 < sum(bits) < d]
    return np.array(rows, dtype=bool).reshape(len(rows), d)


def _sample_coalitions(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    masks = rng.random((n, d)) < 0.5
    while True:
        s = masks.sum(axis=1)
        bad = (s == 0) | (s == d)
        if not bad.any():
            return masks
        masks[bad] = rng.random((int(bad.sum()), d)) < 0.5


def _with_endpoints(masks: np.ndarray) -> np.ndarray:
    d = masks.shape[1]
    return np.vstack([np.zeros((1, d), dtype=bool), np.ones((1, d), dtype=bool), masks])


def explain_kernel_shap(
    model: Model,
    x: np.ndarray,
    cfg: ShapConfig | None = None,
    baseline: Optional[np.ndarray] = None,
    seed: int = 0,
    target: Optional[int] = None,
) -> np.ndarray:
    """Attributions phi with phi.sum() close to f(x) - f(baseline)."""
    cfg = cfg or ShapConfig()
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    if d == 0:
        raise ExplainerError("Kernel SHAP needs at least one feature")
    base = np.zeros(d) if baseline is None else np.asarray(baseline, dtype=float)
    if base.shape != x.shape:
        raise ExplainerError(f"Baseline shape {base.shape} does not match input {x.shape}")
    cls = int(model.predict(x)) if target is None else int(target)

    exhaustive = cfg.exhaustive or (d <= MAX_EXHAUSTIVE_FEATURES and 2**d - 2 <= cfg.subset_size)
    rng = child_generator(seed, "kernel_shap")
    for attempt in range(MAX_RESAMPLES):
        masks = _with_endpoints(all_coalitions(d) if exhaustive else _sample_coalitions(rng, cfg.subset_size, d))
        design = np.hstack([np.ones((masks.shape[0], 1)), masks.astype(float)])
        if exhaustive or np.linalg.matrix_rank(design) == d + 1:
            break
        logger.debug(f"Rank-deficient coalition draw {attempt}; resampling")
    else:
        raise ExplainerError(
            f"Coalition draws stayed rank-deficient after {MAX_RESAMPLES} attempts "
            f"(d={d}, subset_size={cfg.subset_size})"
        )

    values = model.class_probability(np.where(masks, x[None, :], base[None, :]), cls)
    sw = np.sqrt(shapley_kernel_weights(masks, cfg.constraint_weight))
    coef, *_ = np.linalg.lstsq(design * sw[:, None], values * sw, rcond=None)
    return coef[1:]


class KernelShapExplainer(Explainer):
    name = "kernel_shap"

    def __init__(
        self, model: Model, context: ExplainContext | None = None, cfg: ShapConfig | None = None
    ):
        super().__init__(model, context)
        self.cfg = cfg or ShapConfig()
        if self.cfg.baseline == "mean":
            if self.context.train_mean is None:
                raise ExplainerError("Kernel SHAP with a mean baseline needs train means")
            self.baseline = np.asarray(self.context.train_mean, dtype=float)
        else:
            self.baseline = np.zeros(model.n_features)

    def attribute(self, x: np.ndarray, target: int, seed: int) -> np.ndarray:
        return explain_kernel_shap(self.model, x, self.cfg, self.baseline, seed, target)
