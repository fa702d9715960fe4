"""Leaderboard tables and their markdown, CSV and JSON renderings."""

from __future__ import annotations

import io
import json
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import pandas as pd

from ..metrics import MetricResult, higher_is_better
from .config import canonical_format

FLOAT_FORMAT = "%.17g"
FILE_NAMES = {"markdown": "leaderboard.md", "csv": "leaderboard.csv", "json": "leaderboard.json"}
LONG_COLUMNS = [
    "dataset",
    "model",
    "method",
    "metric",
    "mean",
    "stderr",
    "n",
    "n_undefined",
    "majority_mean",
    "minority_mean",
    "reason",
    "fingerprint",
]


@dataclass
class LeaderboardTable:
    """Methods x metrics for one dataset and one model family."""

    dataset: str
    model: str
    methods: list[str]
    metrics: list[str]
    cells: dict[tuple[str, str], MetricResult] = field(default_factory=dict)
    sort_by: Optional[str] = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def cell(self, method: str, metric: str) -> MetricResult:
        try:
            return self.cells[(method, metric)]
        except KeyError:
            return MetricResult.undefined(metric, "not computed")

    def best(self, metric: str) -> set[str]:
        """Methods holding the best mean for ``metric``; empty with fewer than two defined."""
        defined = {m: self.cell(m, metric).mean for m in self.methods if self.cell(m, metric).defined}
        if len(defined) < 2:
            return set()
        target = max(defined.values()) if higher_is_better(metric) else min(defined.values())
        return {m for m, v in defined.items() if v == target}

    def ordered_methods(self) -> list[str]:
        if self.sort_by is None:
            return list(self.methods)
        sign = -1.0 if higher_is_better(self.sort_by) else 1.0

        def key(method: str) -> tuple[int, float, int]:
            r = self.cell(method, self.sort_by or "")
            return (0, sign * r.mean, self.methods.index(method)) if r.defined else (1, 0.0, 0)

        return sorted(self.methods, key=key)

    def to_dict(self) -> dict[str, Any]:
        return {
            "dataset": self.dataset,
            "model": self.model,
            "methods": self.methods,
            "metrics": self.metrics,
            "sort_by": self.sort_by,
            "cells": [
                {"method": method, **self.cell(method, metric).to_dict()}
                for method in self.methods
                for metric in self.metrics
            ],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> LeaderboardTable:
        cells = {}
        for c in data.get("cells", []):
            r = MetricResult.from_dict(c)
            cells[(c["method"], r.metric)] = r
        return cls(
            dataset=data["dataset"],
            model=data["model"],
            methods=list(data["methods"]),
            metrics=list(data["metrics"]),
            cells=cells,
            sort_by=data.get("sort_by"),
            metadata=data.get("metadata", {}),
        )


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------


def _fmt(value: float, digits: int = 4) -> str:
    return "nan" if math.isnan(value) else f"{value:.{digits}f}"


def _markdown_cell(r: MetricResult, bold: bool) -> str:
    if not r.defined:
        return "n/a"
    text = f"{_fmt(r.mean)} ± {_fmt(r.stderr)}"
    if bold:
        text = f"**{text}**"
    if r.n_undefined:
        text += f" ({r.n_undefined} undef.)"
    return text


def render_markdown(tables: Sequence[LeaderboardTable]) -> str:
    out = []
    for t in tables:
        arrows = ["↑" if higher_is_better(m) else "↓" for m in t.metrics]
        out.append(f"## {t.dataset} / {t.model}\n")
        out.append("| method | " + " | ".join(f"{m} {a}" for m, a in zip(t.metrics, arrows)) + " |")
        out.append("|---" * (len(t.metrics) + 1) + "|")
        best = {m: t.best(m) for m in t.metrics}
        for method in t.ordered_methods():
            cells = [_markdown_cell(t.cell(method, m), method in best[m]) for m in t.metrics]
            out.append(f"| {method} | " + " | ".join(cells) + " |")
        notes = sorted(
            {
                f"{m}: {t.cell(method, m).reason}"
                for method in t.methods
                for m in t.metrics
                if not t.cell(method, m).defined and t.cell(method, m).reason
            }
        )
        if notes:
            out.append("")
            out.extend(f"- n/a {note}" for note in notes)
        out.append("")
    return "\n".join(out)


def leaderboard_frame(tables: Sequence[LeaderboardTable]) -> pd.DataFrame:
    rows = []
    for t in tables:
        for method in t.methods:
            for metric in t.metrics:
                r = t.cell(method, metric).to_dict()
                rows.append(
                    {
                        "dataset": t.dataset,
                        "model": t.model,
                        "method": method,
                        **{k: r[k] for k in LONG_COLUMNS[3:-1]},
                        "fingerprint": t.metadata.get("fingerprint"),
                    }
                )
    return pd.DataFrame(rows, columns=LONG_COLUMNS)


def render_csv(tables: Sequence[LeaderboardTable]) -> str:
    buf = io.StringIO()
    leaderboard_frame(tables).to_csv(buf, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buf.getvalue()


def render_json(tables: Sequence[LeaderboardTable]) -> str:
    return json.dumps([t.to_dict() for t in tables], indent=2, sort_keys=True, allow_nan=False) + "\n"


RENDERERS = {"markdown": render_markdown, "csv": render_csv, "json": render_json}


def emit_leaderboard(
    tables: Union[LeaderboardTable, Sequence[LeaderboardTable]],
    fmt: str,
    out_dir: Union[str, Path],
) -> Path:
    """Write ``leaderboard.<ext>`` for ``fmt`` under ``out_dir``."""
    if isinstance(tables, LeaderboardTable):
        tables = [tables]
    key = canonical_format(fmt)
    path = Path(out_dir) / FILE_NAMES[key]
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RENDERERS[key](tables))
    return path


def read_leaderboard_json(path: Union[str, Path]) -> list[LeaderboardTable]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = [data]
    return [LeaderboardTable.from_dict(d) for d in data]


def read_leaderboard_csv(path: Union[str, Path], metadata: Optional[dict[str, Any]] = None) -> list[LeaderboardTable]:
    frame = pd.read_csv(path, float_precision="round_trip", keep_default_na=False, na_values=[""])
    tables: dict[tuple[str, str], LeaderboardTable] = {}
    for row in frame.to_dict(orient="records"):
        key = (str(row["dataset"]), str(row["model"]))
        t = tables.setdefault(key, LeaderboardTable(key[0], key[1], [], [], metadata=dict(metadata or {})))
        if row["method"] not in t.methods:
            t.methods.append(str(row["method"]))
        if row["metric"] not in t.metrics:
            t.metrics.append(str(row["metric"]))
        clean = {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in row.items()}
        t.cells[(str(row["method"]), str(row["metric"]))] = MetricResult.from_dict(clean)
    return list(tables.values())
