"""CSV and JSON-lines forms of explanation sets (17 significant digits)."""

from __future__ import annotations

import json
from collections.abc import Sequence
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from .base import Explanation, ExplainerError

FLOAT_FORMAT = "%.17g"
META_COLUMNS = ["instance_id", "method", "seed", "target"]


def _columns(feature_names: Optional[Sequence[str]], d: int) -> list[str]:
    if feature_names is None:
        return [f"x{j}" for j in range(d)]
    if len(feature_names) != d:
        raise ExplainerError(f"{len(feature_names)} feature names for {d} attributions")
    return list(feature_names)


def explanations_frame(
    explanations: Sequence[Explanation],
    feature_names: Optional[Sequence[str]] = None,
    extra: Optional[dict[str, object]] = None,
) -> pd.DataFrame:
    if not explanations:
        return pd.DataFrame(columns=META_COLUMNS)
    d = explanations[0].n_features
    names = _columns(feature_names, d)
    frame = pd.DataFrame(np.vstack([e.attributions for e in explanations]), columns=names)
    meta = pd.DataFrame(
        {
            "instance_id": [e.instance_id for e in explanations],
            "method": [e.method for e in explanations],
            "seed": [str(e.seed) for e in explanations],
            "target": [e.target for e in explanations],
        }
    )
    for i, (key, value) in enumerate((extra or {}).items()):
        meta.insert(i, key, value)
    return pd.concat([meta, frame], axis=1)


def write_explanations_csv(
    explanations: Sequence[Explanation],
    path: Union[str, Path],
    feature_names: Optional[Sequence[str]] = None,
) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    explanations_frame(explanations, feature_names).to_csv(
        p, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
    )
    return p


def read_explanations_frame(path: Union[str, Path]) -> pd.DataFrame:
    frame = pd.read_csv(
        path, float_precision="round_trip", dtype={"seed": str, "method": str, "model": str}
    )
    missing = [c for c in META_COLUMNS if c not in frame.columns]
    if missing:
        raise ExplainerError(f"{path}: missing columns {missing}")
    return frame


def explanations_from_frame(frame: pd.DataFrame) -> list[Explanation]:
    values = frame.drop(columns=[c for c in frame.columns if c in META_COLUMNS or c == "model"])
    X = values.to_numpy(dtype=float)
    return [
        Explanation(
            attributions=X[i],
            method=str(row.method),
            instance_id=int(row.instance_id),
            seed=int(row.seed),
            target=int(row.target),
        )
        for i, row in enumerate(frame[META_COLUMNS].itertuples(index=False))
    ]


def read_explanations_csv(path: Union[str, Path]) -> list[Explanation]:
    return explanations_from_frame(read_explanations_frame(path))


def write_explanations_jsonl(explanations: Sequence[Explanation], path: Union[str, Path]) -> Path:
    """One JSON object per line; floats go through ``repr`` and round-trip exactly."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        for e in explanations:
            record = {
                "instance_id": e.instance_id,
                "method": e.method,
                "seed": e.seed,
                "target": e.target,
                "attributions": [float(v) for v in e.attributions],
            }
            fh.write(json.dumps(record) + "\n")
    return p


def read_explanations_jsonl(path: Union[str, Path]) -> list[Explanation]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                out.append(Explanation(**record))
            except (json.JSONDecodeError, TypeError) as e:
                raise ExplainerError(f"{path}:{lineno}: bad explanation record: {e}") from e
    return out
