"""Two-logit logistic regression."""

from __future__ import annotations

import numpy as np

from .base import ClassIndex, Model, ModelError


class LinearModel(Model):
    family = "lr"

    def __init__(self, weights: np.ndarray, bias: np.ndarray, metadata: dict | None = None):
        weights = np.array(weights, dtype=float)
        bias = np.array(bias, dtype=float)
        if weights.ndim != 2 or bias.shape != (weights.shape[0],):
            raise ModelError(
                f"Inconsistent shapes: weights {weights.shape}, bias {bias.shape}"
            )
        if not (np.isfinite(weights).all() and np.isfinite(bias).all()):
            raise ModelError("Logistic regression parameters must be finite")
        super().__init__(weights.shape[1], weights.shape[0], metadata)
        self.weights = weights
        self.bias = bias
        self.weights.setflags(write=False)
        self.bias.setflags(write=False)

    def logits(self, x: np.ndarray) -> np.ndarray:
        batch, single = self._as_batch(x)
        z = batch @ self.weights.T + self.bias
        return z[0] if single else z

    def representation(self, x: np.ndarray) -> np.ndarray:
        """Pre-softmax logits Wx + b."""
        return self.logits(x)

    def input_gradient(self, x: np.ndarray, target: ClassIndex) -> np.ndarray:
        batch, single = self._as_batch(x)
        proba = self.predict_proba(batch)
        rows = self._class_rows(target, batch.shape[0])
        grad = self._softmax_gradient(proba, rows) @ self.weights
        return grad[0] if single else grad

    def coefficients(self) -> np.ndarray:
        """w1 - w0: the ground-truth explanation of a two-class model."""
        if self.n_classes != 2:
            raise ModelError("Coefficient ground truth is defined for two classes")
        return self.weights[1] - self.weights[0]

    def parameters(self) -> dict[str, np.ndarray]:
        return {"weights": self.weights, "bias": self.bias}
