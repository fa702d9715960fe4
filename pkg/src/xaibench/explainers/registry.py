"""Explainer lookup by canonical name or short alias."""

from __future__ import annotations

from ..models import Model
from .base import ExplainContext, Explainer, ExplainerConfig, ExplainerError
from .gradients import (
    GradientXInputExplainer,
    IntegratedGradientsExplainer,
    RandomExplainer,
    SmoothGradExplainer,
    VanillaGradientExplainer,
)
from .kernel_shap import KernelShapExplainer
from .lime import LimeExplainer

EXPLAINERS: dict[str, type[Explainer]] = {
    cls.name: cls
    for cls in (
        RandomExplainer,
        VanillaGradientExplainer,
        GradientXInputExplainer,
        SmoothGradExplainer,
        IntegratedGradientsExplainer,
        LimeExplainer,
        KernelShapExplainer,
    )
}

ALIASES = {
    "control": "random",
    "grad": "vanilla_grad",
    "itg": "grad_x_input",
    "sg": "smoothgrad",
    "ig": "integrated_gradients",
    "shap": "kernel_shap",
}


def canonical_name(name: str) -> str:
    key = name.strip().lower()
    key = ALIASES.get(key, key)
    if key not in EXPLAINERS:
        known = sorted(set(EXPLAINERS) | set(ALIASES))
        raise ExplainerError(f"Unknown explainer {name!r}; expected one of {known}")
    return key


def make_explainer(
    name: str,
    model: Model,
    cfg: ExplainerConfig | None = None,
    context: ExplainContext | None = None,
) -> Explainer:
    cfg = cfg or ExplainerConfig()
    key = canonical_name(name)
    if key in ("vanilla_grad", "grad_x_input"):
        return EXPLAINERS[key](model, context, cfg.grad)  # type: ignore[call-arg]
    if key == "smoothgrad":
        return SmoothGradExplainer(model, context, cfg.smoothgrad, cfg.grad.absolute_value)
    if key == "integrated_gradients":
        return IntegratedGradientsExplainer(model, context, cfg.ig)
    if key == "lime":
        return LimeExplainer(model, context, cfg.lime)
    if key == "kernel_shap":
        return KernelShapExplainer(model, context, cfg.shap)
    return RandomExplainer(model, context)
