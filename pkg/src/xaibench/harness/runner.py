# Copyright(c) Microsoft Corporation.
# Licensed under the MIT License.

"""End-to-end benchmark: data, models, explanations, metrics, tables."""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, TypeVar, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from .. import __version__
from ..datasets import (
    DatasetSplit,
    GroundTruth,
    fetch_dataset,
    find_entry,
    generate_synthetic,
    load_csv,
    load_csv_pair,
    load_dataset,
    load_manifest,
)
from ..datasets.manifest import sha256_of
from ..explainers import (
    ExplainContext,
    Explainer,
    Explanation,
    explanations_frame,
    explanations_from_frame,
    make_explainer,
    read_explanations_frame,
    read_explanations_jsonl,
    stack,
    write_explanations_jsonl,
)
from ..metrics import BASE_METRICS, Evaluator, MetricResult, base_metric
from ..models import LinearModel, Model, TRAINERS, load_model, save_model
from ..util import fingerprint, mix
from .config import BenchmarkConfig, DatasetSpec
from .leaderboard import FLOAT_FORMAT, LeaderboardTable, emit_leaderboard

logger = logging.getLogger(__name__)

T = TypeVar("T")


class BenchmarkError(Exception):
    """A benchmark stage failed; carries the stage and, if known, the instance."""

    def __init__(self, stage: str, message: str, instance_id: Optional[int] = None):
        self.stage = stage
        self.instance_id = instance_id
        where = f"stage {stage!r}" + ("" if instance_id is None else f", instance {instance_id}")
        super().__init__(f"{where}: {message}")


# --------------------------------------------------------------------------
# Helpers
# --------------------------------------------------------------------------


def load_benchmark_dataset(spec: DatasetSpec) -> tuple[DatasetSplit, Optional[GroundTruth]]:
    if spec.source == "synthetic":
        return generate_synthetic(spec.synthetic)
    if spec.source == "directory":
        assert spec.path is not None
        return load_dataset(spec.path)
    if spec.source == "manifest":
        assert spec.manifest is not None and spec.name is not None
        entry = find_entry(load_manifest(spec.manifest), spec.name)
        path = fetch_dataset(entry, spec.cache_dir)
        kinds = {k: v.value for k, v in entry.kinds.items()}
        split = load_csv(
            path, kinds, entry.target, entry.protected, spec.test_size, spec.split_seed, spec.scale
        )
        return split, None
    assert spec.path is not None
    if spec.test_path is not None:
        split = load_csv_pair(
            spec.path, spec.test_path, spec.kinds, spec.target, spec.protected, spec.scale
        )
    else:
        split = load_csv(
            spec.path, spec.kinds, spec.target, spec.protected, spec.test_size,
            spec.split_seed, spec.scale,
        )
    return split, None


def dataset_digests(spec: DatasetSpec) -> dict[str, str]:
    """sha256 of every local file the dataset is read from, keyed by role."""
    if spec.source == "synthetic":
        return {}
    if spec.source == "manifest":
        assert spec.manifest is not None
        return {"manifest": sha256_of(spec.manifest)}
    assert spec.path is not None
    if spec.source == "directory":
        files = sorted(p for p in Path(spec.path).iterdir() if p.is_file())
        return {p.name: sha256_of(p) for p in files}
    roles = {"path": spec.path, "test_path": spec.test_path}
    return {role: sha256_of(p) for role, p in roles.items() if p is not None}


def explanation_digest(found: Sequence[Explanation]) -> str:
    return fingerprint([[e.instance_id, e.seed, e.target, e.attributions.tolist()] for e in found])


def _atomic_write(path: Path, write: Callable[[Path], Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".part")
    os.close(fd)
    tmp = Path(tmp_name)
    try:
        write(tmp)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def _clean(value: Any) -> Any:
    """Replace NaN floats so metadata stays valid JSON."""
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


# --------------------------------------------------------------------------
# Runner
# --------------------------------------------------------------------------


@dataclass
class BenchmarkRunner:
    """
    Runs one benchmark configuration stage by stage.

    Every random stream is keyed by the master seed, the stage, the model
    family, the method (where it matters) and the instance id, and results
    are merged by instance index, so outputs do not depend on ``workers``.
    Models, explanations and per-instance scores are cached under
    ``<output_dir>/cache/<fingerprint>/`` and reused on the next run.
    """

    cfg: BenchmarkConfig
    dataset: Optional[DatasetSplit] = field(default=None, init=False)
    truth: Optional[GroundTruth] = field(default=None, init=False)
    models: dict[str, Model] = field(default_factory=dict, init=False)
    explanations: dict[tuple[str, str], list[Explanation]] = field(default_factory=dict, init=False)
    scores: dict[tuple[str, str], dict[str, np.ndarray]] = field(default_factory=dict, init=False)
    tables: list[LeaderboardTable] = field(default_factory=list, init=False)
    wall_time: float = field(default=0.0, init=False)
    _fingerprint: Optional[str] = field(default=None, init=False, repr=False)

    # -- bookkeeping -----------------------------------------------------------

    @property
    def fingerprint(self) -> str:
        if self._fingerprint is None:
            models = {f: sha256_of(p) for f, p in sorted(self.cfg.model_paths.items())}
            data = dataset_digests(self.cfg.dataset)
            self._fingerprint = fingerprint([self.cfg.fingerprint(), models, data])
        return self._fingerprint

    @property
    def cache_dir(self) -> Path:
        return Path(self.cfg.output_dir) / "cache" / self.fingerprint

    @property
    def split(self) -> DatasetSplit:
        if self.dataset is None:
            self.prepare_dataset()
        assert self.dataset is not None
        return self.dataset

    def test_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """Inputs and instance ids of the evaluated test instances."""
        n = len(self.split.test_ids)
        if self.cfg.max_instances is not None:
            n = min(n, self.cfg.max_instances)
        return self.split.test_X[:n], self.split.test_ids[:n]

    def explainer_seed(self, family: str, method: str, instance_id: int) -> int:
        return mix(self.cfg.seed, "explain", self.cfg.explainer_config.seed, family, method, instance_id)

    def neighbourhood_seed(self, family: str, instance_id: int) -> int:
        return mix(self.cfg.seed, "evaluate", self.cfg.perturbation.seed, family, instance_id)

    def _map(self, stage: str, fn: Callable[[int], T], ids: Sequence[int]) -> list[T]:
        """Apply ``fn`` to every index; results come back in index order."""
        n = len(ids)
        results: list[Optional[T]] = [None] * n
        failures: dict[int, Exception] = {}
        bar = tqdm(total=n, unit="inst", desc=stage, dynamic_ncols=True, disable=not self.cfg.progress)

        def run(i: int) -> None:
            try:
                results[i] = fn(i)
            except Exception as e:
                failures[i] = e

        try:
            if self.cfg.workers == 1:
                for i in range(n):
                    run(i)
                    bar.update(1)
                    bar.set_postfix(ok=i + 1 - len(failures), fail=len(failures), refresh=False)
            else:
                with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
                    for _ in pool.map(run, range(n)):
                        bar.update(1)
                        bar.set_postfix(ok=bar.n - len(failures), fail=len(failures), refresh=False)
        finally:
            bar.close()

        if failures:
            first = min(failures)
            raise BenchmarkError(stage, str(failures[first]), int(ids[first])) from failures[first]
        return results  # type: ignore[return-value]

    # -- stages ----------------------------------------------------------------

    def prepare_dataset(self) -> DatasetSplit:
        try:
            self.dataset, self.truth = load_benchmark_dataset(self.cfg.dataset)
        except Exception as e:
            raise BenchmarkError("dataset", str(e)) from e
        logger.info(
            f"Dataset {self.dataset.name!r}: {len(self.dataset.train_y)} train, "
            f"{len(self.dataset.test_y)} test, d={self.dataset.n_features}"
        )
        return self.dataset

    def prepare_model(self, family: str) -> Model:
        if family in self.models:
            return self.models[family]
        split = self.split
        cached = self.cache_dir / "models" / f"{family}.json"
        try:
            if family in self.cfg.model_paths:
                model = load_model(self.cfg.model_paths[family])
            elif cached.is_file():
                model = load_model(cached)
                logger.info(f"Reusing cached {family} model from {cached}")
            else:
                train_cfg = self.cfg.train.model_copy(update={"seed": mix(self.cfg.seed, "train", family)})
                model = TRAINERS[family](split, train_cfg).model
                _atomic_write(cached, lambda p: save_model(model, p))
        except Exception as e:
            raise BenchmarkError("train", f"{family}: {e}") from e
        if model.n_features != split.n_features:
            raise BenchmarkError(
                "train", f"{family} model expects {model.n_features} features, data has {split.n_features}"
            )
        self.models[family] = model
        return model

    def context(self) -> ExplainContext:
        return ExplainContext(train_mean=self.split.train_X.mean(axis=0))

    def make_explainer(self, family: str, method: str) -> Explainer:
        return make_explainer(method, self.prepare_model(family), self.cfg.explainer_config, self.context())

    def explain(self, family: str, method: str) -> list[Explanation]:
        key = (family, method)
        if key in self.explanations:
            return self.explanations[key]
        cached = self.cache_dir / "explanations" / family / f"{method}.jsonl"
        X, ids = self.test_rows()
        if cached.is_file():
            found = read_explanations_jsonl(cached)
            if [e.instance_id for e in found] == [int(i) for i in ids]:
                logger.info(f"Reusing cached {method} explanations for {family}")
                self.explanations[key] = found
                return found
        try:
            explainer = self.make_explainer(family, method)
        except Exception as e:
            raise BenchmarkError("explain", f"{method} on {family}: {e}") from e

        def one(i: int) -> Explanation:
            iid = int(ids[i])
            return explainer.explain(X[i], self.explainer_seed(family, method, iid), None, iid)

        found = self._map(f"explain {family}/{method}", one, ids)
        _atomic_write(cached, lambda p: write_explanations_jsonl(found, p))
        logger.info(f"Explained {len(found)} instances with {method} on {family}")
        self.explanations[key] = found
        return found

    def use_explanations(self, path: Union[str, Path]) -> int:
        """Adopt explanations from an explanations.csv; returns the number of sets loaded."""
        frame = read_explanations_frame(path)
        if "model" not in frame.columns:
            if len(self.cfg.models) != 1:
                raise BenchmarkError("explain", f"{path} has no model column")
            frame.insert(0, "model", self.cfg.models[0])
        _, ids = self.test_rows()
        loaded = 0
        for (family, method), group in frame.groupby(["model", "method"], sort=False):
            found = explanations_from_frame(group.reset_index(drop=True))
            if [e.instance_id for e in found] != [int(i) for i in ids]:
                raise BenchmarkError(
                    "explain", f"{path}: {family}/{method} does not cover the evaluated instances"
                )
            self.explanations[(str(family), str(method))] = found
            loaded += 1
        return loaded

    def ground_truth(self, family: str) -> tuple[Optional[np.ndarray], str]:
        """Per-instance ground truth for ``family`` or the reason there is none."""
        model = self.prepare_model(family)
        _, ids = self.test_rows()
        mode = self.cfg.ground_truth
        if mode == "none":
            return None, "ground truth disabled in config"
        use_model = mode == "model" or (mode == "auto" and isinstance(model, LinearModel))
        if use_model:
            if isinstance(model, LinearModel) and model.n_classes == 2:
                return np.tile(model.coefficients(), (len(ids), 1)), ""
            return None, f"no model-defined ground truth for {family}"
        if self.truth is None:
            return None, f"dataset {self.split.name!r} has no ground-truth explanations"
        return self.truth.for_instances(ids), ""

    def subgroups(self) -> tuple[Optional[np.ndarray], str]:
        X, ids = self.test_rows()
        mode = self.cfg.subgroups
        if mode == "none":
            return None, "subgroups disabled in config"
        j = self.split.protected_index
        if mode in ("auto", "protected") and j is not None:
            return (X[:, j] > 0.5).astype(np.int64), ""
        if mode in ("auto", "cluster") and self.truth is not None:
            threshold = math.ceil(self.truth.n_clusters / 2)
            return (self.truth.cluster_of(ids) >= threshold).astype(np.int64), ""
        return None, f"no subgroup definition ({mode}) for dataset {self.split.name!r}"

    def evaluator(self, family: str, method: str) -> Evaluator:
        X, ids = self.test_rows()
        found = self.explain(family, method)
        truth, truth_reason = self.ground_truth(family)
        groups, groups_reason = self.subgroups()
        return Evaluator(
            model=self.prepare_model(family),
            inputs=X,
            explanations=stack(found) if found else np.zeros_like(X),
            explainer=self.make_explainer(family, method),
            ground_truth=truth,
            groups=groups,
            binary_mask=self.split.binary_mask,
            topk=self.cfg.topk,
            perturbation=self.cfg.perturbation,
            stability=self.cfg.stability,
            neighbourhood_seeds=[self.neighbourhood_seed(family, int(i)) for i in ids],
            explainer_seeds=[e.seed for e in found],
            ground_truth_reason=truth_reason,
            groups_reason=groups_reason,
        )

    def evaluate(self, family: str, method: str) -> dict[str, MetricResult]:
        evaluator = self.evaluator(family, method)
        wanted = {base_metric(m) for m in self.cfg.metrics}
        bases = [b for b in BASE_METRICS if b in wanted]
        _, ids = self.test_rows()
        # keyed by explanation content
        digest = explanation_digest(self.explain(family, method))
        cached = self.cache_dir / "scores" / family / f"{method}-{digest[:16]}.csv"

        table: Optional[dict[str, np.ndarray]] = None
        if cached.is_file():
            frame = pd.read_csv(cached, float_precision="round_trip")
            if list(frame["instance_id"]) == [int(i) for i in ids] and set(bases) <= set(frame.columns):
                table = {b: frame[b].to_numpy(dtype=float) for b in bases}
                logger.info(f"Reusing cached scores for {family}/{method}")
        if table is None:
            rows = self._map(
                f"evaluate {family}/{method}", lambda i: evaluator.instance_scores(i, bases), ids
            )
            table = {b: np.array([r[b] for r in rows], dtype=float) for b in bases}
            frame = pd.DataFrame({"instance_id": ids.astype(np.int64), **table})
            _atomic_write(
                cached,
                lambda p: frame.to_csv(p, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"),
            )
        for b, values in table.items():
            evaluator.store(b, values)
        self.scores[(family, method)] = table
        undefined = {b: int(np.isnan(v).sum()) for b, v in table.items() if np.isnan(v).any()}
        if undefined:
            logger.warning(f"{family}/{method}: undefined per-instance scores {undefined}")
        return evaluator.eval_all(self.cfg.metrics)

    def table_metadata(self, family: str) -> dict[str, Any]:
        model = self.prepare_model(family)
        X, _ = self.test_rows()
        return _clean(
            {
                "fingerprint": self.fingerprint,
                "seed": self.cfg.seed,
                "xaibench_version": __version__,
                "numpy_version": np.__version__,
                "n_instances": int(X.shape[0]),
                "train_accuracy": model.metadata.get("train_accuracy"),
                "test_accuracy": model.accuracy(self.split.test_X, self.split.test_y),
            }
        )

    def run(self) -> list[LeaderboardTable]:
        start = time.perf_counter()
        split = self.split
        self.tables = []
        for family in self.cfg.models:
            self.prepare_model(family)
            cells: dict[tuple[str, str], MetricResult] = {}
            for method in self.cfg.explainers:
                for metric, result in self.evaluate(family, method).items():
                    cells[(method, metric)] = result
            self.tables.append(
                LeaderboardTable(
                    dataset=split.name,
                    model=family,
                    methods=list(self.cfg.explainers),
                    metrics=list(self.cfg.metrics),
                    cells=cells,
                    sort_by=self.cfg.sort_by,
                    metadata=self.table_metadata(family),
                )
            )
        self.wall_time = time.perf_counter() - start
        return self.tables

    # -- outputs ---------------------------------------------------------------

    def write_explanations(self, out_dir: Union[str, Path]) -> Path:
        frames = [
            explanations_frame(self.explanations[(f, m)], self.split.feature_names, {"model": f})
            for f in self.cfg.models
            for m in self.cfg.explainers
            if (f, m) in self.explanations
        ]
        path = Path(out_dir) / "explanations.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    def write_scores(self, out_dir: Union[str, Path]) -> Path:
        _, ids = self.test_rows()
        frames = []
        for (family, method), table in self.scores.items():
            frame = pd.DataFrame({"instance_id": ids.astype(np.int64), **table})
            frame.insert(0, "method", method)
            frame.insert(0, "model", family)
            frames.append(frame)
        path = Path(out_dir) / "metrics.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    def run_metadata(self) -> dict[str, Any]:
        split = self.split
        ecfg = self.cfg.explainer_config
        return _clean(
            {
                "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                "wall_time_seconds": round(self.wall_time, 3),
                "fingerprint": self.fingerprint,
                "config": self.cfg.model_dump(mode="json"),
                "xaibench_version": __version__,
                "dataset": {"name": split.name, **split.metadata},
                "models": {f: m.metadata for f, m in self.models.items()},
                "undefined_counts": {
                    f"{f}/{m}": {b: int(np.isnan(v).sum()) for b, v in t.items()}
                    for (f, m), t in self.scores.items()
                },
                "defaults": {
                    "standardized": split.scaler is not None,
                    "batch_size": self.cfg.train.batch_size,
                    "init": "uniform(+-1/sqrt(fan_in))",
                    "shap_baseline": ecfg.shap.baseline,
                    "ig_baseline": ecfg.ig.baseline,
                    "lime_target": "predicted-class probability",
                    "stability_scale": "natural log" if self.cfg.stability.log_scale else "raw",
                    "n_perturbations": self.cfg.perturbation.n_perturbations,
                    "n_neighbors": self.cfg.stability.n_neighbors,
                    "smoothgrad_samples": ecfg.smoothgrad.n_samples,
                    "lime_samples": ecfg.lime.n_samples,
                    "topk_over_all_k": self.cfg.topk.aggregate_over_k,
                },
            }
        )

    def write_outputs(self, out_dir: Union[str, Path, None] = None) -> list[Path]:
        out = Path(out_dir or self.cfg.output_dir)
        written = [emit_leaderboard(self.tables, fmt, out) for fmt in self.cfg.formats]
        written.append(self.write_explanations(out))
        written.append(self.write_scores(out))
        meta = out / "run_metadata.json"
        meta.write_text(json.dumps(self.run_metadata(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(meta)
        for p in written:
            logger.info(f"Wrote {p}")
        return written


def run_benchmark(cfg: BenchmarkConfig) -> list[LeaderboardTable]:
    """Run ``cfg`` end to end and return one table per model family."""
    return BenchmarkRunner(cfg).run()
