"""Local linear surrogates fitted on Gaussian perturbations."""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.linear_model import Ridge

from ..models import Model
from ..util import child_generator, gaussian
from .base import ExplainContext, Explainer, ExplainerError, LimeConfig


def weighted_ridge(
    Z: np.ndarray, y: np.ndarray, weights: np.ndarray, ridge: float = 1e-8
) -> tuple[np.ndarray, float]:
    """Weighted ridge regression with an unpenalised intercept.

    Returns ``(coefficients, intercept)``.
    """
    if not weights.sum() > 0:
        raise ExplainerError("All surrogate sample weights are zero")
    surrogate = Ridge(alpha=ridge, fit_intercept=True)
    try:
        surrogate.fit(Z, y, sample_weight=weights)
    except (ValueError, np.linalg.LinAlgError) as e:
        raise ExplainerError(f"Surrogate regression failed: {e}") from e
    return np.asarray(surrogate.coef_, dtype=float), float(surrogate.intercept_)


def explain_lime(
    model: Model,
    x: np.ndarray,
    cfg: LimeConfig | None = None,
    seed: int = 0,
    target: Optional[int] = None,
    center: Optional[np.ndarray] = None,
) -> np.ndarray:
    cfg = cfg or LimeConfig()
    x = np.asarray(x, dtype=float)
    cls = int(model.predict(x)) if target is None else int(target)
    if cfg.sample_around_instance:
        origin = x
    else:
        origin = np.zeros_like(x) if center is None else np.asarray(center, dtype=float)
    noise = gaussian(child_generator(seed, "lime"), (cfg.n_samples, x.shape[0]))
    Z = origin[None, :] + cfg.sample_std * noise
    dist2 = np.sum((Z - x[None, :]) ** 2, axis=1)
    weights = np.exp(-dist2 / cfg.kernel_width**2)
    y = model.class_probability(Z, cls)
    coef, _ = weighted_ridge(Z, y, weights, cfg.ridge)
    return coef


class LimeExplainer(Explainer):
    name = "lime"

    def __init__(
        self, model: Model, context: ExplainContext | None = None, cfg: LimeConfig | None = None
    ):
        super().__init__(model, context)
        self.cfg = cfg or LimeConfig()
        if self.cfg.discretize:
            raise ExplainerError("LIME with discretized features is not supported")

    def attribute(self, x: np.ndarray, target: int, seed: int) -> np.ndarray:
        return explain_lime(self.model, x, self.cfg, seed, target, self.context.train_mean)
