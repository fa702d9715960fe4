"""Neighbourhood sampling: Gaussian noise on continuous features, flips on binary ones."""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

from ..util import gaussian
from .base import MetricError, PerturbationConfig


class PerturbationDraw(NamedTuple):
    """Raw randomness for ``n`` neighbours, reusable under different masks."""

    noise: np.ndarray  # (n, d) continuous offsets
    flips: np.ndarray  # (n, d) bool


def draw_perturbations(
    rng: np.random.Generator, n: int, d: int, cfg: PerturbationConfig
) -> PerturbationDraw:
    noise = cfg.mean + cfg.std * gaussian(rng, (n, d))
    flips = rng.random((n, d)) < cfg.flip_percentage
    return PerturbationDraw(noise, flips)


def apply_perturbations(
    x: np.ndarray,
    draw: PerturbationDraw,
    perturb_mask: np.ndarray,
    binary_mask: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Perturbed copies of ``x``: one row per draw, untouched outside ``perturb_mask``."""
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    perturb_mask = np.asarray(perturb_mask, dtype=bool)
    binary = np.zeros(d, dtype=bool) if binary_mask is None else np.asarray(binary_mask, dtype=bool)
    if perturb_mask.shape != (d,) or binary.shape != (d,) or draw.noise.shape[1] != d:
        raise MetricError(f"Perturbation masks do not match {d} features")

    out = np.repeat(x[None, :], draw.noise.shape[0], axis=0)
    cont = perturb_mask & ~binary
    out[:, cont] += draw.noise[:, cont]
    flip = draw.flips & (perturb_mask & binary)[None, :]
    out[flip] = 1.0 - out[flip]
    return out


def perturb_instance(
    x: np.ndarray,
    perturb_mask: np.ndarray,
    rng: np.random.Generator,
    cfg: PerturbationConfig | None = None,
    binary_mask: Optional[np.ndarray] = None,
    n: Optional[int] = None,
) -> np.ndarray:
    """Draw ``n`` neighbours (default ``cfg.n_perturbations``); a 1-D result when ``n == 1``."""
    cfg = cfg or PerturbationConfig()
    x = np.asarray(x, dtype=float)
    count = cfg.n_perturbations if n is None else n
    draw = draw_perturbations(rng, count, x.shape[0], cfg)
    out = apply_perturbations(x, draw, perturb_mask, binary_mask)
    return out[0] if n == 1 else out
