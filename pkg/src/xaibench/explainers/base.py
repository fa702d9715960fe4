from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..models import Model

DEFAULT_NOISE_STD = float(np.sqrt(0.05))


class ExplainerError(Exception):
    """Raised when an explanation cannot be produced for an instance."""

    pass


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class GradConfig(_Frozen):
    absolute_value: bool = False


class SmoothGradConfig(_Frozen):
    n_samples: int = Field(default=500, gt=0)
    std: float = Field(default=DEFAULT_NOISE_STD, ge=0)


class IntegratedGradientsConfig(_Frozen):
    method: Literal["gausslegendre", "riemann_trapezoid"] = "gausslegendre"
    n_steps: int = Field(default=50, gt=0)
    baseline: Literal["mean", "zero"] = "mean"
    multiply_by_inputs: bool = False


class LimeConfig(_Frozen):
    n_samples: int = Field(default=1000, gt=0)
    kernel_width: float = Field(default=0.75, gt=0)
    sample_std: float = Field(default=DEFAULT_NOISE_STD, gt=0)
    discretize: bool = False
    sample_around_instance: bool = True
    ridge: float = Field(default=1e-8, ge=0)


class ShapConfig(_Frozen):
    subset_size: int = Field(default=50, gt=0)
    baseline: Literal["zero", "mean"] = "zero"
    exhaustive: bool = False
    constraint_weight: float = Field(default=1e6, gt=0)


class ExplainerConfig(_Frozen):
    """Hyperparameters of every method plus the master seed."""

    grad: GradConfig = GradConfig()
    smoothgrad: SmoothGradConfig = SmoothGradConfig()
    ig: IntegratedGradientsConfig = IntegratedGradientsConfig()
    lime: LimeConfig = LimeConfig()
    shap: ShapConfig = ShapConfig()
    seed: int = 0


@dataclass(frozen=True)
class ExplainContext:
    """Data-dependent inputs some explainers need (the IG baseline)."""

    train_mean: Optional[np.ndarray] = None


# --------------------------------------------------------------------------
# Results and contract
# --------------------------------------------------------------------------


@dataclass
class Explanation:
    attributions: np.ndarray
    method: str
    instance_id: int = -1
    seed: int = 0
    target: int = -1

    def __post_init__(self) -> None:
        self.attributions = np.asarray(self.attributions, dtype=float)
        if self.attributions.ndim != 1:
            raise ExplainerError(
                f"{self.method}: attributions must be a vector, got shape "
                f"{self.attributions.shape}"
            )
        if not np.isfinite(self.attributions).all():
            raise ExplainerError(
                f"{self.method}: non-finite attribution for instance {self.instance_id}"
            )

    @property
    def n_features(self) -> int:
        return self.attributions.shape[0]


class Explainer(ABC):
    """Maps an instance to a signed attribution vector of the same length."""

    name: str = ""

    def __init__(self, model: Model, context: ExplainContext | None = None):
        self.model = model
        self.context = context or ExplainContext()

    def resolve_target(self, x: np.ndarray, target: Optional[int]) -> int:
        if target is None:
            return int(self.model.predict(x))
        if not 0 <= int(target) < self.model.n_classes:
            raise ExplainerError(f"{self.name}: class {target} out of range")
        return int(target)

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if arr.ndim != 1 or arr.shape[0] != self.model.n_features:
            raise ExplainerError(
                f"{self.name}: expected a vector of {self.model.n_features} features, "
                f"got shape {arr.shape}"
            )
        return arr

    @abstractmethod
    def attribute(self, x: np.ndarray, target: int, seed: int) -> np.ndarray:
        pass

    def explain(
        self,
        x: np.ndarray,
        seed: int = 0,
        target: Optional[int] = None,
        instance_id: int = -1,
    ) -> Explanation:
        x = self._check_input(x)
        cls = self.resolve_target(x, target)
        return Explanation(
            attributions=self.attribute(x, cls, seed),
            method=self.name,
            instance_id=instance_id,
            seed=seed,
            target=cls,
        )

    def explain_many(
        self,
        X: np.ndarray,
        seeds: Sequence[int],
        targets: Optional[Sequence[Optional[int]]] = None,
        instance_ids: Optional[Sequence[int]] = None,
    ) -> list[Explanation]:
        n = len(X)
        if len(seeds) != n:
            raise ExplainerError(f"{self.name}: {n} instances but {len(seeds)} seeds")
        targets = targets if targets is not None else [None] * n
        instance_ids = instance_ids if instance_ids is not None else list(range(n))
        return [
            self.explain(X[i], seeds[i], targets[i], int(instance_ids[i])) for i in range(n)
        ]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(model={self.model!r})"


def stack(explanations: Sequence[Explanation]) -> np.ndarray:
    """Attribution matrix with one row per explanation."""
    if not explanations:
        return np.zeros((0, 0))
    return np.vstack([e.attributions for e in explanations])


