from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..explainers import Explainer
from ..models import Model
from .agreement import agreement_score
from .aggregate import aggregate
from .base import (
    AGREEMENT_METRICS,
    GAP_METRICS,
    STABILITY_METRICS,
    MetricError,
    MetricResult,
    PerturbationConfig,
    StabilityConfig,
    TopKConfig,
    base_metric,
    canonical_metric,
    is_disparity,
)
from .faithfulness import prediction_gap, prediction_gap_auc
from .fairness import disparity_result
from .stability import stability_scores

logger = logging.getLogger(__name__)


@dataclass
class Evaluator:
    """
    Scores one explanation method on one model over a set of instances.

    Per-instance scores are cached per base metric, so a disparity metric
    reuses the scores of its base metric. ``neighbourhood_seeds`` drive every
    perturbation and do not depend on the method; ``explainer_seeds`` are the
    seeds the explanations were produced with.
    """

    model: Model
    inputs: np.ndarray
    explanations: np.ndarray
    explainer: Optional[Explainer] = None
    ground_truth: Optional[np.ndarray] = None
    groups: Optional[np.ndarray] = None
    binary_mask: Optional[np.ndarray] = None
    topk: TopKConfig = field(default_factory=TopKConfig)
    perturbation: PerturbationConfig = field(default_factory=PerturbationConfig)
    stability: StabilityConfig = field(default_factory=StabilityConfig)
    neighbourhood_seeds: Optional[Sequence[int]] = None
    explainer_seeds: Optional[Sequence[int]] = None
    ground_truth_reason: str = "no ground truth for this dataset and model"
    groups_reason: str = "no subgroups defined"
    _scores: dict[str, np.ndarray] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        self.inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        self.explanations = np.atleast_2d(np.asarray(self.explanations, dtype=float))
        n = self.inputs.shape[0]
        if self.explanations.shape != self.inputs.shape:
            raise MetricError(
                f"Explanations {self.explanations.shape} do not match inputs {self.inputs.shape}"
            )
        if self.ground_truth is not None:
            self.ground_truth = np.atleast_2d(np.asarray(self.ground_truth, dtype=float))
            if self.ground_truth.shape[0] == 1 and n > 1:
                self.ground_truth = np.repeat(self.ground_truth, n, axis=0)
            if self.ground_truth.shape != self.inputs.shape:
                raise MetricError(
                    f"Ground truth {self.ground_truth.shape} does not match inputs "
                    f"{self.inputs.shape}"
                )
        if self.groups is not None and np.asarray(self.groups).shape != (n,):
            raise MetricError(f"Expected {n} subgroup labels")
        if self.neighbourhood_seeds is None:
            self.neighbourhood_seeds = list(range(n))
        if self.explainer_seeds is None:
            self.explainer_seeds = list(range(n))

    @property
    def n_instances(self) -> int:
        return self.inputs.shape[0]

    def undefined_reason(self, base: str) -> Optional[str]:
        """Why ``base`` cannot be scored at all, or None when it can."""
        if base in AGREEMENT_METRICS and self.ground_truth is None:
            return self.ground_truth_reason
        if base in STABILITY_METRICS and self.explainer is None:
            return "stability needs the explainer that produced the explanations"
        return None

    # --------------------------------------------------------------------------
    # Per-instance scores
    # --------------------------------------------------------------------------

    def instance_scores(self, i: int, bases: Iterable[str]) -> dict[str, float]:
        """Scores of instance ``i`` for each requested base metric."""
        x, e = self.inputs[i], self.explanations[i]
        assert self.neighbourhood_seeds is not None and self.explainer_seeds is not None
        seed = int(self.neighbourhood_seeds[i])
        out: dict[str, float] = {}
        pending_stability = []
        k = None if self.topk.aggregate_over_k else self.topk.resolve(x.shape[0])
        for base in bases:
            if self.undefined_reason(base) is not None:
                out[base] = float("nan")
            elif base in AGREEMENT_METRICS:
                assert self.ground_truth is not None
                out[base] = agreement_score(e, self.ground_truth[i], base, k)
            elif base in GAP_METRICS:
                if k is None:
                    out[base] = prediction_gap_auc(
                        self.model, x, e, base, self.perturbation, seed, self.binary_mask
                    )
                else:
                    out[base] = prediction_gap(
                        self.model, x, e, k, base, self.perturbation, seed, self.binary_mask
                    )
            elif base in STABILITY_METRICS:
                pending_stability.append(base)
            else:
                raise MetricError(f"{base!r} is not a base metric")
        if pending_stability:
            assert self.explainer is not None
            out.update(
                stability_scores(
                    self.model,
                    x,
                    self.explainer,
                    seed=seed,
                    explainer_seed=int(self.explainer_seeds[i]),
                    binary_mask=self.binary_mask,
                    scfg=self.stability,
                    pcfg=self.perturbation,
                    e_x=e,
                    modes=pending_stability,
                )
            )
        return out

    def store(self, base: str, scores: np.ndarray) -> None:
        scores = np.asarray(scores, dtype=float)
        if scores.shape != (self.n_instances,):
            raise MetricError(f"Expected {self.n_instances} scores for {base}")
        self._scores[base] = scores

    def scores(self, base: str) -> np.ndarray:
        if base not in self._scores:
            rows = [self.instance_scores(i, [base])[base] for i in range(self.n_instances)]
            self._scores[base] = np.array(rows, dtype=float)
        return self._scores[base]

    # --------------------------------------------------------------------------
    # Public API
    # --------------------------------------------------------------------------

    def eval(self, metric: str) -> MetricResult:
        """Aggregate one of the 22 metrics, e.g. ``"PGU"`` or ``"RC_disparity"``."""
        metric = canonical_metric(metric)
        base = base_metric(metric)
        reason = self.undefined_reason(base)
        if reason is not None:
            return MetricResult.undefined(metric, reason)
        if is_disparity(metric):
            if self.groups is None:
                return MetricResult.undefined(metric, self.groups_reason)
            return disparity_result(self.scores(base), np.asarray(self.groups), base)
        reason = "no same-prediction neighbour" if base in STABILITY_METRICS else None
        return aggregate(self.scores(base), metric, reason)

    def eval_all(self, metrics: Iterable[str]) -> dict[str, MetricResult]:
        return {canonical_metric(m): self.eval(m) for m in metrics}
