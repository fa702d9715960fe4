"""Ingest user-supplied CSV files into XAI-ready dataset splits."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from .preprocessing import split, standardize
from .schema import DatasetError, DatasetSplit, FeatureKind, FeatureSchema

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read(path: PathLike) -> pd.DataFrame:
    p = Path(path)
    if not p.is_file():
        raise DatasetError(f"CSV file not found: {p}")
    try:
        return pd.read_csv(p, encoding="utf-8", dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DatasetError(f"Could not parse {p}: {e}") from e


def _binary_levels(values: pd.Series) -> tuple[str, str]:
    distinct = sorted(set(values))
    if len(distinct) > 2:
        raise DatasetError(
            f"Column {values.name!r} is declared discrete-binary but has "
            f"{len(distinct)} distinct values"
        )
    numeric = pd.to_numeric(pd.Series(distinct), errors="coerce")
    if not numeric.isna().any():
        distinct = [distinct[i] for i in np.argsort(numeric.to_numpy(), kind="stable")]
    if len(distinct) == 1:
        # A single level maps to 0 unless it is numerically 1.
        only = distinct[0]
        return ("0", only) if _as_float(only) == 1.0 else (only, "1")
    return distinct[0], distinct[1]


def _as_float(value: str) -> Optional[float]:
    try:
        return float(value)
    except ValueError:
        return None


def _encode_binary(values: pd.Series, levels: tuple[str, str]) -> np.ndarray:
    return (values.to_numpy() == levels[1]).astype(float)


def _encode_continuous(values: pd.Series) -> np.ndarray:
    numeric = pd.to_numeric(values, errors="coerce")
    bad = numeric.isna()
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise DatasetError(
            f"Non-numeric value {values.iloc[row]!r} in continuous column "
            f"{values.name!r} (data row {row + 1})"
        )
    return numeric.to_numpy(dtype=float)


def _infer_kind(values: pd.Series) -> FeatureKind:
    if values.nunique() <= 2:
        return FeatureKind.DISCRETE_BINARY
    return FeatureKind.CONTINUOUS


def _encode_frame(
    frame: pd.DataFrame,
    target: str,
    hints: Mapping[str, str],
    protected: Optional[str],
    reference: Optional[pd.DataFrame] = None,
) -> tuple[np.ndarray, np.ndarray, list[FeatureSchema]]:
    """Type and encode every column; ``reference`` fixes levels and kinds."""
    if target not in frame.columns:
        raise DatasetError(f"Target column {target!r} not found in CSV header")
    if protected is not None and protected not in frame.columns:
        raise DatasetError(f"Protected column {protected!r} not found in CSV header")
    unknown = set(hints) - set(frame.columns)
    if unknown:
        raise DatasetError(f"Schema hints name unknown columns: {sorted(unknown)}")

    basis = reference if reference is not None else frame
    if basis[target].nunique() > 2:
        raise DatasetError(f"Target column {target!r} must be binary")
    target_levels = _binary_levels(basis[target].rename(target))
    if not set(frame[target]) <= set(target_levels):
        raise DatasetError(f"Target column {target!r} must be binary")
    y = _encode_binary(frame[target], target_levels).astype(np.int64)

    columns: list[np.ndarray] = []
    schema: list[FeatureSchema] = []
    for name in frame.columns:
        if name == target:
            continue
        hint = hints.get(name)
        kind = FeatureKind(hint) if hint is not None else _infer_kind(basis[name])
        if kind is FeatureKind.DISCRETE_BINARY:
            levels = _binary_levels(basis[name])
            if not set(frame[name]) <= set(levels):
                raise DatasetError(
                    f"Column {name!r} is discrete-binary but has values outside {levels}"
                )
            columns.append(_encode_binary(frame[name], levels))
            schema.append(
                FeatureSchema(
                    name=name,
                    kind=kind,
                    protected=name == protected,
                    levels=None if levels == ("0", "1") else levels,
                )
            )
        else:
            columns.append(_encode_continuous(frame[name]))
            schema.append(FeatureSchema(name=name, kind=kind, protected=name == protected))

    X = np.column_stack(columns) if columns else np.zeros((len(frame), 0))
    return X, y, schema


def load_csv(
    path: PathLike,
    hints: Optional[Mapping[str, str]] = None,
    target: str = "label",
    protected: Optional[str] = None,
    test_size: float = 0.3,
    seed: int = 0,
    scale: bool = True,
) -> DatasetSplit:
    """Load a CSV with a header row and split it into train and test.

    Columns named in ``hints`` get the given kind; the others are inferred:
    at most two distinct values makes a column discrete-binary, anything else
    is continuous. Continuous columns are standardized with train statistics
    unless ``scale`` is false.
    """
    frame = _read(path)
    X, y, schema = _encode_frame(frame, target, hints or {}, protected)
    if X.shape[1] == 0:
        raise DatasetError(f"{path} has no feature columns besides {target!r}")

    dataset = split(
        X, y, ratio=1.0 - test_size, seed=seed, schema=schema, name=Path(path).stem
    )
    if scale:
        dataset = standardize(dataset)
    dataset.metadata.update(
        {"source": str(path), "target": target, "standardized": scale}
    )
    logger.info(
        f"Loaded {path}: {X.shape[0]} rows, {X.shape[1]} features, "
        f"{sum(f.is_binary for f in schema)} discrete-binary"
    )
    return dataset


def load_csv_pair(
    train_path: PathLike,
    test_path: PathLike,
    hints: Optional[Mapping[str, str]] = None,
    target: str = "label",
    protected: Optional[str] = None,
    scale: bool = True,
) -> DatasetSplit:
    """Load a dataset that ships with predetermined train and test files."""
    train_frame = _read(train_path)
    test_frame = _read(test_path)
    if list(train_frame.columns) != list(test_frame.columns):
        raise DatasetError("Train and test CSV headers differ")

    both = pd.concat([train_frame, test_frame], ignore_index=True)
    train_X, train_y, schema = _encode_frame(
        train_frame, target, hints or {}, protected, reference=both
    )
    test_X, test_y, _ = _encode_frame(
        test_frame, target, hints or {}, protected, reference=both
    )
    n_train = len(train_frame)
    dataset = DatasetSplit(
        train_X=train_X,
        train_y=train_y,
        test_X=test_X,
        test_y=test_y,
        schema=tuple(schema),
        train_ids=np.arange(n_train, dtype=np.int64),
        test_ids=np.arange(n_train, n_train + len(test_frame), dtype=np.int64),
        name=Path(train_path).stem,
    )
    if scale:
        dataset = standardize(dataset)
    dataset.metadata.update(
        {
            "source": [str(train_path), str(test_path)],
            "target": target,
            "standardized": scale,
        }
    )
    return dataset
