"""Relative input, representation and output stability of explanations.

Scores are the largest ratio, over same-prediction neighbours, of the
explanation's relative change to the relative change of the input (RIS),
the model's first-layer representation (RRS) or its output probabilities
(ROS). Values are reported as natural logarithms; NaN marks an instance
whose neighbourhood has no neighbour with the same prediction.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Optional

import numpy as np

from ..explainers import Explainer
from ..models import Model
from ..util import child_generator
from .base import STABILITY_METRICS, MetricError, PerturbationConfig, StabilityConfig
from .perturbation import perturb_instance

logger = logging.getLogger(__name__)


def percent_change(before: np.ndarray, after: np.ndarray, eps_num: float = 1e-12) -> np.ndarray:
    """(before - after) / before, rowwise; tiny denominators keep their sign."""
    before = np.asarray(before, dtype=float)
    after = np.asarray(after, dtype=float)
    denom = np.where(np.abs(before) < eps_num, np.where(before < 0, -eps_num, eps_num), before)
    return (before - after) / denom


def _norm(v: np.ndarray, p: float) -> np.ndarray:
    return np.linalg.norm(np.atleast_2d(v), ord=p, axis=1)


def stability_ratios(
    e_x: np.ndarray,
    e_neighbours: np.ndarray,
    r_x: np.ndarray,
    r_neighbours: np.ndarray,
    cfg: StabilityConfig | None = None,
) -> np.ndarray:
    """Per-neighbour ratio of explanation change to reference change."""
    cfg = cfg or StabilityConfig()
    num = _norm(percent_change(e_x[None, :], np.atleast_2d(e_neighbours), cfg.eps_num), cfg.p)
    den = _norm(percent_change(r_x[None, :], np.atleast_2d(r_neighbours), cfg.eps_num), cfg.p)
    return num / np.maximum(den, cfg.eps_min)


def report_scale(ratio_max: float, cfg: StabilityConfig) -> float:
    clamped = max(ratio_max, cfg.eps_num)
    return float(np.log(clamped)) if cfg.log_scale else float(clamped)


def stability_scores(
    model: Model,
    x: np.ndarray,
    explainer: Explainer,
    seed: int = 0,
    explainer_seed: int = 0,
    binary_mask: Optional[np.ndarray] = None,
    scfg: StabilityConfig | None = None,
    pcfg: PerturbationConfig | None = None,
    e_x: Optional[np.ndarray] = None,
    modes: Sequence[str] = STABILITY_METRICS,
) -> dict[str, float]:
    """RIS, RRS and ROS from one shared neighbourhood and one set of explanations.

    ``seed`` drives the neighbourhood and ``explainer_seed`` is reused for the
    explanation at ``x`` and at every neighbour.
    """
    scfg = scfg or StabilityConfig()
    pcfg = pcfg or PerturbationConfig()
    modes = [m.upper() for m in modes]
    unknown = set(modes) - set(STABILITY_METRICS)
    if unknown:
        raise MetricError(f"Unknown stability modes {sorted(unknown)}")

    x = np.asarray(x, dtype=float)
    cls = int(model.predict(x))
    neighbours = perturb_instance(
        x,
        np.ones(x.shape[0], dtype=bool),
        child_generator(seed, "stability"),
        pcfg,
        binary_mask,
        n=scfg.n_neighbors,
    )
    neighbours = np.atleast_2d(neighbours)
    neighbours = neighbours[model.predict(neighbours) == cls]
    if neighbours.shape[0] == 0:
        logger.debug("No same-prediction neighbour; stability undefined")
        return {m: float("nan") for m in modes}

    if e_x is None:
        e_x = explainer.explain(x, explainer_seed, cls).attributions
    e_nb = np.vstack([explainer.explain(xn, explainer_seed, cls).attributions for xn in neighbours])

    references = {
        "RIS": (x, neighbours),
        "RRS": (model.representation(x), model.representation(neighbours)),
        "ROS": (model.predict_proba(x), model.predict_proba(neighbours)),
    }
    out = {}
    for m in modes:
        r_x, r_nb = references[m]
        ratios = stability_ratios(np.asarray(e_x, dtype=float), e_nb, r_x, r_nb, scfg)
        out[m] = report_scale(float(ratios.max()), scfg)
    return out


def relative_stability(
    model: Model,
    x: np.ndarray,
    explainer: Explainer,
    mode: str = "RIS",
    seed: int = 0,
    explainer_seed: int = 0,
    binary_mask: Optional[np.ndarray] = None,
    scfg: StabilityConfig | None = None,
    pcfg: PerturbationConfig | None = None,
) -> float:
    return stability_scores(
        model, x, explainer, seed, explainer_seed, binary_mask, scfg, pcfg, modes=[mode]
    )[mode.upper()]
