from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Union

import numpy as np
from scipy.special import softmax

ClassIndex = Union[int, np.ndarray]


class ModelError(Exception):
    """Raised on invalid inputs, failed training or unreadable model files."""

    pass


class Model(ABC):
    """Predictor contract shared by both model families.

    Every method accepts a single instance of shape ``(d,)`` or a batch of
    shape ``(n, d)`` and returns outputs with the matching leading shape.
    Models are immutable after training, so all methods are safe to call
    concurrently.
    """

    family: str = ""

    def __init__(self, n_features: int, n_classes: int = 2, metadata: dict | None = None):
        self.n_features = n_features
        self.n_classes = n_classes
        self.metadata: dict = dict(metadata or {})

    # --------------------------------------------------------------------------
    # Helpers
    # --------------------------------------------------------------------------

    def _as_batch(self, x: np.ndarray) -> tuple[np.ndarray, bool]:
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        batch = arr[None, :] if single else arr
        if batch.ndim != 2 or batch.shape[1] != self.n_features:
            raise ModelError(
                f"{self.family} model expects {self.n_features} features, "
                f"got input of shape {arr.shape}"
            )
        return batch, single

    def _class_rows(self, target: ClassIndex, n: int) -> np.ndarray:
        rows = np.broadcast_to(np.asarray(target, dtype=np.int64), (n,))
        if ((rows < 0) | (rows >= self.n_classes)).any():
            raise ModelError(f"Class index out of range for {self.n_classes} classes")
        return rows

    @staticmethod
    def _softmax_gradient(proba: np.ndarray, rows: np.ndarray) -> np.ndarray:
        """d p_c / d logits = p_c (e_c - p), one row per instance."""
        n = proba.shape[0]
        p_c = proba[np.arange(n), rows]
        grad = -proba * p_c[:, None]
        grad[np.arange(n), rows] += p_c
        return grad

    # --------------------------------------------------------------------------
    # Contract
    # --------------------------------------------------------------------------

    @abstractmethod
    def logits(self, x: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def input_gradient(self, x: np.ndarray, target: ClassIndex) -> np.ndarray:
        """Exact gradient of the ``target`` class probability w.r.t. the input."""
        pass

    @abstractmethod
    def representation(self, x: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def parameters(self) -> dict[str, np.ndarray]:
        pass

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return softmax(self.logits(x), axis=-1)

    def class_probability(self, x: np.ndarray, target: ClassIndex) -> np.ndarray:
        """Probability of ``target`` (one index, or one per row)."""
        proba = np.atleast_2d(self.predict_proba(x))
        p = proba[np.arange(proba.shape[0]), self._class_rows(target, proba.shape[0])]
        return p[0] if np.ndim(x) == 1 else p

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(x), axis=-1)

    def accuracy(self, X: np.ndarray, y: np.ndarray) -> float:
        return float(np.mean(self.predict(X) == np.asarray(y)))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(d={self.n_features}, C={self.n_classes})"
