"""Mini-batch Adam training for both model families."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import log_softmax, softmax

from ..datasets import DatasetSplit
from ..util import child_generator
from .base import Model, ModelError
from .linear import LinearModel
from .mlp import HIDDEN_UNITS, LAYER_NAMES, MlpModel

logger = logging.getLogger(__name__)

Params = dict[str, np.ndarray]
GradFn = Callable[[Params, np.ndarray, np.ndarray], tuple[float, Params]]


class TrainConfig(BaseModel):
    """Optimiser settings shared by both families."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    epochs: int = Field(default=50, ge=0)
    learning_rate: float = Field(default=1e-3, gt=0)
    batch_size: int = Field(default=32, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps: float = Field(default=1e-8, gt=0)
    seed: int = 0


@dataclass
class TrainingResult:
    model: Model
    loss_trace: list[float] = field(default_factory=list)
    train_accuracy: float = float("nan")
    test_accuracy: float = float("nan")


@dataclass
class Adam:
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    _m: Params = field(default_factory=dict)
    _v: Params = field(default_factory=dict)
    _t: int = 0

    def step(self, params: Params, grads: Params) -> None:
        self._t += 1
        c1 = 1.0 - self.beta1**self._t
        c2 = 1.0 - self.beta2**self._t
        for name, g in grads.items():
            m = self._m.setdefault(name, np.zeros_like(g))
            v = self._v.setdefault(name, np.zeros_like(g))
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            params[name] -= self.learning_rate * (m / c1) / (np.sqrt(v / c2) + self.eps)


# --------------------------------------------------------------------------
# Helpers
# --------------------------------------------------------------------------


def _uniform_layer(rng: np.random.Generator, fan_out: int, fan_in: int) -> tuple[np.ndarray, np.ndarray]:
    bound = 1.0 / np.sqrt(fan_in)
    W = rng.uniform(-bound, bound, size=(fan_out, fan_in))
    b = rng.uniform(-bound, bound, size=fan_out)
    return W, b


def _cross_entropy(z: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean loss and its gradient w.r.t. the logits."""
    n = z.shape[0]
    loss = -float(np.mean(log_softmax(z, axis=1)[np.arange(n), y]))
    dz = softmax(z, axis=1)
    dz[np.arange(n), y] -= 1.0
    return loss, dz / n


def _linear_grads(params: Params, X: np.ndarray, y: np.ndarray) -> tuple[float, Params]:
    z = X @ params["weights"].T + params["bias"]
    loss, dz = _cross_entropy(z, y)
    return loss, {"weights": dz.T @ X, "bias": dz.sum(axis=0)}


def _mlp_grads(params: Params, X: np.ndarray, y: np.ndarray) -> tuple[float, Params]:
    h1 = X @ params["W1"].T + params["b1"]
    a1 = np.maximum(h1, 0.0)
    h2 = a1 @ params["W2"].T + params["b2"]
    a2 = np.maximum(h2, 0.0)
    z = a2 @ params["W3"].T + params["b3"]
    loss, dz = _cross_entropy(z, y)

    grads = {"W3": dz.T @ a2, "b3": dz.sum(axis=0)}
    d2 = (dz @ params["W3"]) * (h2 > 0.0)
    grads["W2"], grads["b2"] = d2.T @ a1, d2.sum(axis=0)
    d1 = (d2 @ params["W2"]) * (h1 > 0.0)
    grads["W1"], grads["b1"] = d1.T @ X, d1.sum(axis=0)
    return loss, grads


def _check_training_data(split: DatasetSplit) -> None:
    classes = np.unique(split.train_y)
    if classes.size < 2:
        raise ModelError(
            f"Training data of {split.name!r} contains a single class {classes.tolist()}"
        )


def _fit(
    family: str, params: Params, grad_fn: GradFn, split: DatasetSplit, cfg: TrainConfig
) -> list[float]:
    X, y = split.train_X, split.train_y.astype(np.int64)
    n = X.shape[0]
    opt = Adam(cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps)
    trace: list[float] = []
    for epoch in range(cfg.epochs):
        order = child_generator(cfg.seed, "shuffle", family, epoch).permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            loss, grads = grad_fn(params, X[idx], y[idx])
            opt.step(params, grads)
            total += loss * idx.size
        trace.append(total / n)
        if not all(np.isfinite(p).all() for p in params.values()):
            raise ModelError(f"{family} training diverged at epoch {epoch}")
        logger.debug(f"{family} epoch {epoch + 1}/{cfg.epochs}: loss={trace[-1]:.6f}")
    return trace


def _finish(model: Model, trace: list[float], split: DatasetSplit, cfg: TrainConfig) -> TrainingResult:
    result = TrainingResult(
        model=model,
        loss_trace=trace,
        train_accuracy=model.accuracy(split.train_X, split.train_y),
        test_accuracy=model.accuracy(split.test_X, split.test_y),
    )
    model.metadata.update(
        {
            "dataset": split.name,
            "seed": cfg.seed,
            "epochs": cfg.epochs,
            "learning_rate": cfg.learning_rate,
            "batch_size": cfg.batch_size,
            "init": "uniform(+-1/sqrt(fan_in))",
            "train_accuracy": result.train_accuracy,
            "test_accuracy": result.test_accuracy,
        }
    )
    logger.info(
        f"Trained {model.family} on {split.name!r}: train acc {result.train_accuracy:.4f}, "
        f"test acc {result.test_accuracy:.4f}"
    )
    return result


# --------------------------------------------------------------------------
# Public API
# --------------------------------------------------------------------------


def train_logistic(split: DatasetSplit, cfg: TrainConfig | None = None, n_classes: int = 2) -> TrainingResult:
    cfg = cfg or TrainConfig()
    _check_training_data(split)
    rng = child_generator(cfg.seed, "init", "lr")
    W, b = _uniform_layer(rng, n_classes, split.n_features)
    params = {"weights": W, "bias": b}
    trace = _fit("lr", params, _linear_grads, split, cfg)
    return _finish(LinearModel(params["weights"], params["bias"]), trace, split, cfg)


def train_mlp(
    split: DatasetSplit,
    cfg: TrainConfig | None = None,
    hidden: int = HIDDEN_UNITS,
    n_classes: int = 2,
) -> TrainingResult:
    cfg = cfg or TrainConfig()
    _check_training_data(split)
    rng = child_generator(cfg.seed, "init", "ann")
    shapes = ((hidden, split.n_features), (hidden, hidden), (n_classes, hidden))
    params: Params = {}
    for i, (fan_out, fan_in) in enumerate(shapes):
        W, b = _uniform_layer(rng, fan_out, fan_in)
        params[LAYER_NAMES[2 * i]], params[LAYER_NAMES[2 * i + 1]] = W, b
    trace = _fit("ann", params, _mlp_grads, split, cfg)
    return _finish(MlpModel(**params), trace, split, cfg)


TRAINERS = {"lr": train_logistic, "ann": train_mlp}
