from .aggregate import aggregate, combined_stderr
from .agreement import (
    agreement_curve,
    agreement_score,
    auc_over_k,
    importance_ranks,
    pairwise_rank_agreement,
    rank_correlation,
    top_k_indices,
    topk_agreement,
)
from .base import (
    AGREEMENT_METRICS,
    ALL_METRICS,
    BASE_METRICS,
    GAP_METRICS,
    STABILITY_METRICS,
    MetricError,
    MetricResult,
    PerturbationConfig,
    StabilityConfig,
    TopKConfig,
    base_metric,
    canonical_metric,
    higher_is_better,
    is_disparity,
)
from .evaluator import Evaluator
from .fairness import EmptySubgroupError, disparity_result, subgroup_disparity
from .faithfulness import prediction_gap, prediction_gap_auc, prediction_gap_curve
from .perturbation import apply_perturbations, draw_perturbations, perturb_instance
from .stability import (
    percent_change,
    relative_stability,
    stability_ratios,
    stability_scores,
)

__all__ = [
    "AGREEMENT_METRICS",
    "ALL_METRICS",
    "BASE_METRICS",
    "EmptySubgroupError",
    "Evaluator",
    "GAP_METRICS",
    "MetricError",
    "MetricResult",
    "PerturbationConfig",
    "STABILITY_METRICS",
    "StabilityConfig",
    "TopKConfig",
    "aggregate",
    "agreement_curve",
    "agreement_score",
    "apply_perturbations",
    "auc_over_k",
    "base_metric",
    "canonical_metric",
    "combined_stderr",
    "disparity_result",
    "draw_perturbations",
    "higher_is_better",
    "importance_ranks",
    "is_disparity",
    "pairwise_rank_agreement",
    "percent_change",
    "perturb_instance",
    "prediction_gap",
    "prediction_gap_auc",
    "prediction_gap_curve",
    "rank_correlation",
    "relative_stability",
    "stability_ratios",
    "stability_scores",
    "subgroup_disparity",
    "top_k_indices",
    "topk_agreement",
]
