from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .base import MetricError, MetricResult


def aggregate(scores: np.ndarray, metric: str = "", reason: Optional[str] = None) -> MetricResult:
    """Mean and standard error (sample std / sqrt(n)); NaN scores are excluded and counted."""
    values = np.asarray(scores, dtype=float).ravel()
    defined = values[~np.isnan(values)]
    n_undefined = int(values.size - defined.size)
    if defined.size == 0:
        return MetricResult.undefined(
            metric,
            reason or ("no instances" if values.size == 0 else "undefined for every instance"),
            n_undefined,
        )
    mean = float(np.mean(defined))
    stderr = 0.0 if defined.size == 1 else float(np.std(defined, ddof=1) / math.sqrt(defined.size))
    return MetricResult(
        metric=metric,
        mean=mean,
        stderr=stderr,
        n=int(defined.size),
        n_undefined=n_undefined,
        scores=values,
        reason=reason if n_undefined else None,
    )


def combined_stderr(a: MetricResult, b: MetricResult) -> float:
    if not (a.defined and b.defined):
        raise MetricError("Cannot combine undefined results")
    return math.sqrt(a.stderr**2 + b.stderr**2)
