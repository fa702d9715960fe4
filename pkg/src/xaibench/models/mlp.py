"""Fully connected ReLU network with two hidden layers and a softmax output."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.special import softmax

from .base import ClassIndex, Model, ModelError

HIDDEN_UNITS = 100
LAYER_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3")


class ForwardPass(NamedTuple):
    h1: np.ndarray  # first hidden pre-activation
    h2: np.ndarray  # second hidden pre-activation
    z: np.ndarray  # output logits


class MlpModel(Model):
    family = "ann"

    def __init__(
        self,
        W1: np.ndarray,
        b1: np.ndarray,
        W2: np.ndarray,
        b2: np.ndarray,
        W3: np.ndarray,
        b3: np.ndarray,
        metadata: dict | None = None,
    ):
        params = [np.array(p, dtype=float) for p in (W1, b1, W2, b2, W3, b3)]
        W1, b1, W2, b2, W3, b3 = params
        if not (
            W1.ndim == 2
            and b1.shape == (W1.shape[0],)
            and W2.shape == (b2.shape[0], W1.shape[0])
            and W3.shape == (b3.shape[0], W2.shape[0])
        ):
            raise ModelError(
                "Inconsistent layer shapes: "
                + ", ".join(f"{n}{p.shape}" for n, p in zip(LAYER_NAMES, params))
            )
        if not all(np.isfinite(p).all() for p in params):
            raise ModelError("Network parameters must be finite")
        super().__init__(W1.shape[1], W3.shape[0], metadata)
        self.W1, self.b1, self.W2, self.b2, self.W3, self.b3 = params
        for p in params:
            p.setflags(write=False)

    def forward(self, x: np.ndarray) -> ForwardPass:
        batch, _ = self._as_batch(x)
        h1 = batch @ self.W1.T + self.b1
        h2 = np.maximum(h1, 0.0) @ self.W2.T + self.b2
        z = np.maximum(h2, 0.0) @ self.W3.T + self.b3
        return ForwardPass(h1, h2, z)

    def logits(self, x: np.ndarray) -> np.ndarray:
        z = self.forward(x).z
        return z[0] if np.ndim(x) == 1 else z

    def representation(self, x: np.ndarray) -> np.ndarray:
        """First hidden layer pre-activation W1 x + b1."""
        h1 = self.forward(x).h1
        return h1[0] if np.ndim(x) == 1 else h1

    def input_gradient(self, x: np.ndarray, target: ClassIndex) -> np.ndarray:
        """Backpropagate d p_target / d logits through both ReLU layers."""
        batch, single = self._as_batch(x)
        h1, h2, z = self.forward(batch)
        proba = softmax(z, axis=1)
        rows = self._class_rows(target, batch.shape[0])

        g = self._softmax_gradient(proba, rows) @ self.W3
        g = (g * (h2 > 0.0)) @ self.W2
        g = (g * (h1 > 0.0)) @ self.W1
        return g[0] if single else g

    def parameters(self) -> dict[str, np.ndarray]:
        return dict(zip(LAYER_NAMES, (self.W1, self.b1, self.W2, self.b2, self.W3, self.b3)))
