from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class MetricError(Exception):
    """Raised on malformed metric inputs (length mismatch, k out of range, empty groups)."""

    pass


AGREEMENT_METRICS = ("FA", "RA", "SA", "SRA", "RC", "PRA")
TOPK_METRICS = ("FA", "RA", "SA", "SRA")
GAP_METRICS = ("PGI", "PGU")
STABILITY_METRICS = ("RIS", "RRS", "ROS")
BASE_METRICS = AGREEMENT_METRICS + GAP_METRICS + STABILITY_METRICS
DISPARITY_SUFFIX = "_disparity"
ALL_METRICS = BASE_METRICS + tuple(m + DISPARITY_SUFFIX for m in BASE_METRICS)
HIGHER_IS_BETTER = frozenset(AGREEMENT_METRICS + ("PGI",))


def base_metric(name: str) -> str:
    return name[: -len(DISPARITY_SUFFIX)] if name.endswith(DISPARITY_SUFFIX) else name


def is_disparity(name: str) -> bool:
    return name.endswith(DISPARITY_SUFFIX)


def higher_is_better(name: str) -> bool:
    return name in HIGHER_IS_BETTER


def canonical_metric(name: str) -> str:
    head, sep, tail = name.strip().partition("_")
    key = head.upper() + (DISPARITY_SUFFIX if sep and tail.lower() == "disparity" else "")
    if (sep and tail.lower() != "disparity") or key not in ALL_METRICS:
        raise MetricError(f"Unknown metric {name!r}; expected one of {list(ALL_METRICS)}")
    return key


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class TopKConfig(_Frozen):
    percentage_most_important: float = Field(default=0.25, gt=0, le=1)
    k: Optional[int] = Field(default=None, ge=1)
    # Report the area under the k = 1..d curve instead of the single-k value.
    aggregate_over_k: bool = True

    def resolve(self, d: int) -> int:
        k = self.k if self.k is not None else max(1, round(self.percentage_most_important * d))
        if k > d:
            raise MetricError(f"k={k} exceeds the number of features {d}")
        return k


class PerturbationConfig(_Frozen):
    mean: float = 0.0
    std: float = Field(default=0.05, gt=0)
    flip_percentage: float = Field(default=0.03, ge=0, le=1)
    n_perturbations: int = Field(default=100, gt=0)
    seed: int = 0


class StabilityConfig(_Frozen):
    p: float = Field(default=2.0, ge=1)
    eps_min: float = Field(default=1e-6, gt=0)
    eps_num: float = Field(default=1e-12, gt=0)
    n_neighbors: int = Field(default=100, gt=0)
    log_scale: bool = True


# --------------------------------------------------------------------------
# Results
# --------------------------------------------------------------------------


def _nan_to_none(value: float) -> Optional[float]:
    return None if value is None or math.isnan(value) else float(value)


@dataclass
class MetricResult:
    """Mean and standard error of one metric; NaN means undefined."""

    metric: str
    mean: float
    stderr: float
    n: int
    n_undefined: int = 0
    scores: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    group_means: Optional[tuple[float, float]] = None
    reason: Optional[str] = None

    @property
    def defined(self) -> bool:
        return not math.isnan(self.mean)

    def to_dict(self) -> dict[str, Any]:
        return {
            "metric": self.metric,
            "mean": _nan_to_none(self.mean),
            "stderr": _nan_to_none(self.stderr),
            "n": self.n,
            "n_undefined": self.n_undefined,
            "majority_mean": None if self.group_means is None else _nan_to_none(self.group_means[0]),
            "minority_mean": None if self.group_means is None else _nan_to_none(self.group_means[1]),
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MetricResult:
        def num(v: Any) -> float:
            return float("nan") if v is None else float(v)

        groups = None
        if data.get("majority_mean") is not None or data.get("minority_mean") is not None:
            groups = (num(data.get("majority_mean")), num(data.get("minority_mean")))
        return cls(
            metric=data["metric"],
            mean=num(data.get("mean")),
            stderr=num(data.get("stderr")),
            n=int(data.get("n", 0)),
            n_undefined=int(data.get("n_undefined", 0)),
            group_means=groups,
            reason=data.get("reason"),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MetricResult):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    @classmethod
    def undefined(cls, metric: str, reason: str, n_undefined: int = 0) -> MetricResult:
        return cls(metric, float("nan"), float("nan"), 0, n_undefined, reason=reason)
