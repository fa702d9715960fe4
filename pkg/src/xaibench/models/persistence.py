"""Self-describing JSON model files with bit-exact parameter round-trips."""

from __future__ import annotations

import base64
import binascii
import json
import logging
from pathlib import Path
from typing import Any, Union

import numpy as np

from .base import Model, ModelError
from .linear import LinearModel
from .mlp import MlpModel

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
FAMILIES: dict[str, type[Model]] = {"lr": LinearModel, "ann": MlpModel}
FAMILY_ALIASES = {"mlp": "ann", "logistic": "lr"}


def canonical_family(name: str) -> str:
    family = FAMILY_ALIASES.get(name.lower(), name.lower())
    if family not in FAMILIES:
        raise ModelError(f"Unknown model family {name!r}; expected one of {sorted(FAMILIES)}")
    return family


def _encode(arr: np.ndarray) -> str:
    return base64.b64encode(np.ascontiguousarray(arr, dtype="<f8").tobytes()).decode("ascii")


def _decode(data: str, shape: list[int], name: str) -> np.ndarray:
    try:
        raw = base64.b64decode(data, validate=True)
    except (binascii.Error, ValueError) as e:
        raise ModelError(f"Parameter {name!r} is not valid base64") from e
    expected = int(np.prod(shape)) * 8
    if len(raw) != expected:
        raise ModelError(f"Parameter {name!r} holds {len(raw)} bytes, expected {expected}")
    return np.frombuffer(raw, dtype="<f8").reshape(shape).astype(float)


def save_model(model: Model, path: Union[str, Path]) -> Path:
    params = model.parameters()
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "family": model.family,
        "n_features": model.n_features,
        "n_classes": model.n_classes,
        "shapes": {k: list(v.shape) for k, v in params.items()},
        "parameters": {k: _encode(v) for k, v in params.items()},
        "metadata": model.metadata,
    }
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Saved {model.family} model to {p}")
    return p


def load_model(path: Union[str, Path]) -> Model:
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ModelError(f"Model file not found: {p}") from e
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ModelError(f"Corrupt model file {p}: {e}") from e

    if not isinstance(doc, dict):
        raise ModelError(f"Corrupt model file {p}: top level is not an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelError(
            f"Unsupported model format version {version!r} in {p}; expected {FORMAT_VERSION}"
        )
    try:
        family = canonical_family(str(doc["family"]))
        shapes, encoded = doc["shapes"], doc["parameters"]
        params = {name: _decode(encoded[name], shapes[name], name) for name in shapes}
        model = FAMILIES[family](**params, metadata=doc.get("metadata") or {})
    except KeyError as e:
        raise ModelError(f"Corrupt model file {p}: missing field {e}") from e
    except TypeError as e:
        raise ModelError(f"Corrupt model file {p}: {e}") from e
    return model
