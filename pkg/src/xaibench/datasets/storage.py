"""On-disk form of generated datasets: two CSVs plus schema and ground truth."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from .schema import DatasetError, DatasetSplit, FeatureSchema, GroundTruth, Scaler

ID_COLUMN = "instance_id"
LABEL_COLUMN = "label"
FLOAT_FORMAT = "%.17g"


def _frame(X: np.ndarray, y: np.ndarray, ids: np.ndarray, names: list[str]) -> pd.DataFrame:
    frame = pd.DataFrame(X, columns=names)
    frame.insert(0, ID_COLUMN, ids.astype(np.int64))
    frame[LABEL_COLUMN] = y.astype(np.int64)
    return frame


def save_dataset(
    dataset: DatasetSplit,
    out_dir: Union[str, Path],
    truth: Optional[GroundTruth] = None,
) -> list[Path]:
    """Write train.csv, test.csv, schema.json and (if given) ground_truth.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = dataset.feature_names
    written = []
    for label, X, y, ids in (
        ("train", dataset.train_X, dataset.train_y, dataset.train_ids),
        ("test", dataset.test_X, dataset.test_y, dataset.test_ids),
    ):
        path = out / f"{label}.csv"
        _frame(X, y, ids, names).to_csv(
            path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
        )
        written.append(path)

    schema = {
        "name": dataset.name,
        "features": [f.to_dict() for f in dataset.schema],
        "scaler": None
        if dataset.scaler is None
        else {"mean": dataset.scaler.mean.tolist(), "std": dataset.scaler.std.tolist()},
        "metadata": dataset.metadata,
    }
    path = out / "schema.json"
    path.write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(path)

    if truth is not None:
        path = out / "ground_truth.json"
        path.write_text(json.dumps(truth.to_dict()) + "\n", encoding="utf-8")
        written.append(path)
    return written


def load_dataset(
    in_dir: Union[str, Path],
) -> tuple[DatasetSplit, Optional[GroundTruth]]:
    """Read back what :func:`save_dataset` wrote."""
    src = Path(in_dir)
    schema_path = src / "schema.json"
    if not schema_path.is_file():
        raise DatasetError(f"No schema.json in {src}")
    meta = json.loads(schema_path.read_text(encoding="utf-8"))
    schema = tuple(FeatureSchema.from_dict(f) for f in meta["features"])
    names = [f.name for f in schema]

    parts = {}
    for label in ("train", "test"):
        frame = pd.read_csv(src / f"{label}.csv", float_precision="round_trip")
        parts[label] = (
            frame[names].to_numpy(dtype=float),
            frame[LABEL_COLUMN].to_numpy(dtype=np.int64),
            frame[ID_COLUMN].to_numpy(dtype=np.int64),
        )

    scaler = None
    if meta.get("scaler") is not None:
        scaler = Scaler(
            mean=np.asarray(meta["scaler"]["mean"]), std=np.asarray(meta["scaler"]["std"])
        )
    dataset = DatasetSplit(
        train_X=parts["train"][0],
        train_y=parts["train"][1],
        test_X=parts["test"][0],
        test_y=parts["test"][1],
        schema=schema,
        train_ids=parts["train"][2],
        test_ids=parts["test"][2],
        scaler=scaler,
        name=meta.get("name", src.name),
        metadata=meta.get("metadata", {}),
    )

    truth = None
    truth_path = src / "ground_truth.json"
    if truth_path.is_file():
        truth = GroundTruth.from_dict(json.loads(truth_path.read_text(encoding="utf-8")))
    return dataset, truth
