"""Random control and the gradient family: vanilla, x input, smoothed, integrated."""

from __future__ import annotations

from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..models import Model
from ..util import child_generator, gaussian
from .base import (
    ExplainContext,
    Explainer,
    ExplainerError,
    GradConfig,
    IntegratedGradientsConfig,
    SmoothGradConfig,
)


def _predicted(model: Model, x: np.ndarray, target: Optional[int]) -> int:
    return int(model.predict(x)) if target is None else int(target)


def explain_random(d: int, seed: int) -> np.ndarray:
    if d < 1:
        raise ExplainerError(f"Random attributions need d >= 1, got {d}")
    return child_generator(seed, "random").uniform(-1.0, 1.0, size=d)


def explain_vanilla_gradient(
    model: Model, x: np.ndarray, target: Optional[int] = None, absolute: bool = False
) -> np.ndarray:
    g = model.input_gradient(x, _predicted(model, x, target))
    return np.abs(g) if absolute else g


def explain_gradient_x_input(
    model: Model, x: np.ndarray, target: Optional[int] = None, absolute: bool = False
) -> np.ndarray:
    return explain_vanilla_gradient(model, x, target, absolute) * np.asarray(x, dtype=float)


def explain_smoothgrad(
    model: Model,
    x: np.ndarray,
    cfg: SmoothGradConfig | None = None,
    seed: int = 0,
    target: Optional[int] = None,
    absolute: bool = False,
) -> np.ndarray:
    """Mean gradient over Gaussian perturbations of ``x``.

    The explained class is fixed at ``x`` and kept for every noisy sample.
    """
    cfg = cfg or SmoothGradConfig()
    cls = _predicted(model, x, target)
    if cfg.std == 0.0:
        return explain_vanilla_gradient(model, x, cls, absolute)
    noise = cfg.std * gaussian(child_generator(seed, "smoothgrad"), (cfg.n_samples, x.shape[0]))
    grads = model.input_gradient(x[None, :] + noise, cls)
    if absolute:
        grads = np.abs(grads)
    return grads.mean(axis=0)


def path_nodes(method: str, n_steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes on [0, 1] and weights summing to 1."""
    if method == "gausslegendre":
        u, w = leggauss(n_steps)
        return (u + 1.0) / 2.0, w / 2.0
    if method == "riemann_trapezoid":
        if n_steps == 1:
            return np.array([1.0]), np.array([1.0])
        t = np.linspace(0.0, 1.0, n_steps)
        w = np.full(n_steps, 1.0 / (n_steps - 1))
        w[[0, -1]] /= 2.0
        return t, w
    raise ExplainerError(f"Unknown integration method {method!r}")


def explain_integrated_gradients(
    model: Model,
    x: np.ndarray,
    cfg: IntegratedGradientsConfig | None = None,
    baseline: Optional[np.ndarray] = None,
    target: Optional[int] = None,
) -> np.ndarray:
    """Path-averaged gradient from ``baseline`` to ``x``.

    With ``multiply_by_inputs`` the average is scaled by ``x - baseline``.
    """
    cfg = cfg or IntegratedGradientsConfig()
    x = np.asarray(x, dtype=float)
    base = np.zeros_like(x) if baseline is None else np.asarray(baseline, dtype=float)
    if base.shape != x.shape:
        raise ExplainerError(f"Baseline shape {base.shape} does not match input {x.shape}")
    cls = _predicted(model, x, target)
    t, w = path_nodes(cfg.method, cfg.n_steps)
    path = base[None, :] + t[:, None] * (x - base)[None, :]
    avg = w @ model.input_gradient(path, cls)
    return avg * (x - base) if cfg.multiply_by_inputs else avg


# --------------------------------------------------------------------------
# Explainer classes
# --------------------------------------------------------------------------


class RandomExplainer(Explainer):
    name = "random"

    def attribute(self, x: np.ndarray, target: int, seed: int) -> np.ndarray:
        return explain_random(x.shape[0], seed)


class VanillaGradientExplainer(Explainer):
    name = "vanilla_grad"

    def __init__(self, model: Model, context: ExplainContext | None = None, cfg: GradConfig | None = None):
        super().__init__(model, context)
        self.cfg = cfg or GradConfig()

    def attribute(self, x: np.ndarray, target: int, seed: int) -> np.ndarray:
        return explain_vanilla_gradient(self.model, x, target, self.cfg.absolute_value)


class GradientXInputExplainer(VanillaGradientExplainer):
    name = "grad_x_input"

    def attribute(self, x: np.ndarray, target: int, seed: int) -> np.ndarray:
        return explain_gradient_x_input(self.model, x, target, self.cfg.absolute_value)


class SmoothGradExplainer(Explainer):
    name = "smoothgrad"

    def __init__(
        self,
        model: Model,
        context: ExplainContext | None = None,
        cfg: SmoothGradConfig | None = None,
        absolute: bool = False,
    ):
        super().__init__(model, context)
        self.cfg = cfg or SmoothGradConfig()
        self.absolute = absolute

    def attribute(self, x: np.ndarray, target: int, seed: int) -> np.ndarray:
        return explain_smoothgrad(self.model, x, self.cfg, seed, target, self.absolute)


class IntegratedGradientsExplainer(Explainer):
    name = "integrated_gradients"

    def __init__(
        self,
        model: Model,
        context: ExplainContext | None = None,
        cfg: IntegratedGradientsConfig | None = None,
    ):
        super().__init__(model, context)
        self.cfg = cfg or IntegratedGradientsConfig()
        self.baseline = self._baseline()

    def _baseline(self) -> np.ndarray:
        if self.cfg.baseline == "zero":
            return np.zeros(self.model.n_features)
        if self.context.train_mean is None:
            raise ExplainerError("Integrated gradients with a mean baseline need train means")
        mean = np.asarray(self.context.train_mean, dtype=float)
        if mean.shape != (self.model.n_features,):
            raise ExplainerError(
                f"Baseline has {mean.shape} entries, model expects {self.model.n_features}"
            )
        return mean

    def attribute(self, x: np.ndarray, target: int, seed: int) -> np.ndarray:
        return explain_integrated_gradients(self.model, x, self.cfg, self.baseline, target)
