"""Subgroup disparity of per-instance metric scores."""

from __future__ import annotations

import numpy as np

from .aggregate import aggregate, combined_stderr
from .base import DISPARITY_SUFFIX, MetricError, MetricResult


class EmptySubgroupError(MetricError):
    """Raised when one subgroup has no defined score."""

    pass


def _groups(scores: np.ndarray, groups: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=float).ravel()
    groups = np.asarray(groups).ravel()
    if scores.shape != groups.shape:
        raise MetricError(f"{scores.size} scores but {groups.size} group labels")
    if not np.isin(groups, (0, 1)).all():
        raise MetricError("Subgroup labels must be binary (0/1)")
    keep = ~np.isnan(scores)
    g = groups[keep].astype(np.int64)
    s = scores[keep]
    zero, one = s[g == 0], s[g == 1]
    if zero.size == 0 or one.size == 0:
        raise EmptySubgroupError(
            f"Empty subgroup: {zero.size} defined scores in group 0, {one.size} in group 1"
        )
    # The larger group is the majority; ties go to group 0.
    return (zero, one) if zero.size >= one.size else (one, zero)


def subgroup_disparity(scores: np.ndarray, groups: np.ndarray) -> tuple[float, float, float]:
    """(majority mean, minority mean, |difference|)."""
    major, minor = _groups(scores, groups)
    m_major, m_minor = float(np.mean(major)), float(np.mean(minor))
    return m_major, m_minor, abs(m_major - m_minor)


def disparity_result(scores: np.ndarray, groups: np.ndarray, base: str = "") -> MetricResult:
    metric = base + DISPARITY_SUFFIX
    try:
        major, minor = _groups(scores, groups)
    except EmptySubgroupError as e:
        return MetricResult.undefined(metric, str(e))
    r_major, r_minor = aggregate(major, base), aggregate(minor, base)
    values = np.asarray(scores, dtype=float)
    return MetricResult(
        metric=metric,
        mean=abs(r_major.mean - r_minor.mean),
        stderr=combined_stderr(r_major, r_minor),
        n=r_major.n + r_minor.n,
        n_undefined=int(np.isnan(values).sum()),
        scores=values,
        group_means=(r_major.mean, r_minor.mean),
    )
