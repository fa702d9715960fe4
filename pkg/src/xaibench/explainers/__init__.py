from .base import (
    ExplainContext,
    Explainer,
    ExplainerConfig,
    ExplainerError,
    Explanation,
    GradConfig,
    IntegratedGradientsConfig,
    LimeConfig,
    ShapConfig,
    SmoothGradConfig,
    stack,
)
from .gradients import (
    GradientXInputExplainer,
    IntegratedGradientsExplainer,
    RandomExplainer,
    SmoothGradExplainer,
    VanillaGradientExplainer,
    explain_gradient_x_input,
    explain_integrated_gradients,
    explain_random,
    explain_smoothgrad,
    explain_vanilla_gradient,
)
from .kernel_shap import KernelShapExplainer, explain_kernel_shap, shapley_kernel_weights
from .lime import LimeExplainer, explain_lime, weighted_ridge
from .registry import ALIASES, EXPLAINERS, canonical_name, make_explainer
from .storage import (
    explanations_frame,
    explanations_from_frame,
    read_explanations_csv,
    read_explanations_frame,
    read_explanations_jsonl,
    write_explanations_csv,
    write_explanations_jsonl,
)

__all__ = [
    "ALIASES",
    "EXPLAINERS",
    "ExplainContext",
    "Explainer",
    "ExplainerConfig",
    "ExplainerError",
    "Explanation",
    "GradConfig",
    "GradientXInputExplainer",
    "IntegratedGradientsConfig",
    "IntegratedGradientsExplainer",
    "KernelShapExplainer",
    "LimeConfig",
    "LimeExplainer",
    "RandomExplainer",
    "ShapConfig",
    "SmoothGradConfig",
    "SmoothGradExplainer",
    "VanillaGradientExplainer",
    "canonical_name",
    "explain_gradient_x_input",
    "explain_integrated_gradients",
    "explain_kernel_shap",
    "explain_lime",
    "explain_random",
    "explain_smoothgrad",
    "explain_vanilla_gradient",
    "explanations_frame",
    "explanations_from_frame",
    "make_explainer",
    "read_explanations_csv",
    "read_explanations_frame",
    "read_explanations_jsonl",
    "shapley_kernel_weights",
    "stack",
    "weighted_ridge",
    "write_explanations_csv",
    "write_explanations_jsonl",
]
