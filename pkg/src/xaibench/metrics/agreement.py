"""Agreement between an explanation and a ground-truth attribution vector."""

from __future__ import annotations

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import rankdata

from .base import TOPK_METRICS, MetricError


def _pair(e: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    e = np.asarray(e, dtype=float).ravel()
    g = np.asarray(g, dtype=float).ravel()
    if e.shape != g.shape:
        raise MetricError(f"Attribution lengths differ: {e.shape[0]} vs {g.shape[0]}")
    return e, g


def top_k_indices(e: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest |e|, ties broken by ascending index."""
    return np.argsort(-np.abs(e), kind="stable")[:k]


def topk_agreement(e: np.ndarray, g: np.ndarray, k: int, mode: str = "FA") -> float:
    e, g = _pair(e, g)
    d = e.shape[0]
    if not 1 <= k <= d:
        raise MetricError(f"k={k} outside 1..{d}")
    mode = mode.upper()
    if mode not in TOPK_METRICS:
        raise MetricError(f"Unknown top-k mode {mode!r}")
    te, tg = top_k_indices(e, k), top_k_indices(g, k)

    if mode in ("RA", "SRA"):
        hit = te == tg
    else:
        hit = np.isin(te, tg)
    if mode in ("SA", "SRA"):
        hit &= np.sign(e[te]) == np.sign(g[te])
    return float(hit.sum()) / k


def agreement_curve(e: np.ndarray, g: np.ndarray, mode: str = "FA") -> np.ndarray:
    """``topk_agreement`` for k = 1..d."""
    e, g = _pair(e, g)
    return np.array([topk_agreement(e, g, k, mode) for k in range(1, e.shape[0] + 1)])


def auc_over_k(curve: np.ndarray) -> float:
    """Trapezoidal area over k = 1..d scaled by 1/(d-1); a single point is returned as is."""
    curve = np.asarray(curve, dtype=float)
    if curve.size == 0:
        raise MetricError("Cannot integrate an empty curve")
    if curve.size == 1:
        return float(curve[0])
    return float(trapezoid(curve, dx=1.0) / (curve.size - 1))


def importance_ranks(e: np.ndarray) -> np.ndarray:
    """Rank 1 is the largest magnitude; ties share their average rank."""
    return rankdata(-np.abs(e), method="average")


def rank_correlation(e: np.ndarray, g: np.ndarray) -> float:
    e, g = _pair(e, g)
    if e.shape[0] < 2:
        raise MetricError("Rank correlation needs at least two features")
    re, rg = importance_ranks(e), importance_ranks(g)
    if np.ptp(re) == 0.0 or np.ptp(rg) == 0.0:
        return 1.0 if np.array_equal(re, rg) else 0.0
    return float(np.clip(np.corrcoef(re, rg)[0, 1], -1.0, 1.0))


def pairwise_rank_agreement(e: np.ndarray, g: np.ndarray) -> float:
    e, g = _pair(e, g)
    d = e.shape[0]
    if d < 2:
        raise MetricError("Pairwise rank agreement needs at least two features")
    i, j = np.triu_indices(d, k=1)
    ae, ag = np.abs(e), np.abs(g)
    same = np.sign(ae[i] - ae[j]) == np.sign(ag[i] - ag[j])
    return float(same.mean())


def agreement_score(e: np.ndarray, g: np.ndarray, metric: str, k: int | None = None) -> float:
    """Per-instance value of one agreement metric.

    Top-k metrics use the area under their k-curve when ``k`` is None.
    """
    if metric == "RC":
        return rank_correlation(e, g)
    if metric == "PRA":
        return pairwise_rank_agreement(e, g)
    if k is None:
        return auc_over_k(agreement_curve(e, g, metric))
    return topk_agreement(e, g, k, metric)
