"""Benchmark configuration: one JSON document validated with pydantic."""

from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..datasets import SynthConfig
from ..explainers import ExplainerConfig, ExplainerError, canonical_name
from ..metrics import (
    ALL_METRICS,
    MetricError,
    PerturbationConfig,
    StabilityConfig,
    TopKConfig,
    canonical_metric,
)
from ..models import ModelError, TrainConfig, canonical_family
from ..util import fingerprint
from ..util.env import XAIBENCH_CACHE_DIR

# Fields that change how a run executes but not what it computes.
EXECUTION_FIELDS = frozenset({"workers", "output_dir", "formats", "progress"})
FORMATS = ("markdown", "csv", "json")
FORMAT_ALIASES = {"md": "markdown"}


class ConfigError(Exception):
    """Raised for configuration problems detected outside pydantic validation."""

    pass


def canonical_format(name: str) -> str:
    key = FORMAT_ALIASES.get(name.lower(), name.lower())
    if key not in FORMATS:
        raise ConfigError(f"Unknown output format {name!r}; expected one of {list(FORMATS)}")
    return key


class DatasetSpec(BaseModel):
    """Where the benchmark data comes from.

    ``synthetic`` generates data in memory, ``csv`` reads one file (or a
    train/test pair), ``manifest`` fetches a named entry and ``directory``
    reads the output of the ``generate`` subcommand.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    source: Literal["synthetic", "csv", "manifest", "directory"] = "synthetic"
    synthetic: SynthConfig = SynthConfig()
    path: Optional[str] = None
    test_path: Optional[str] = None
    target: str = "label"
    protected: Optional[str] = None
    kinds: dict[str, str] = Field(default_factory=dict)
    test_size: float = Field(default=0.3, gt=0, lt=1)
    split_seed: int = Field(default=0, ge=0)
    scale: bool = True
    manifest: Optional[str] = None
    name: Optional[str] = None
    cache_dir: str = str(XAIBENCH_CACHE_DIR)

    @model_validator(mode="after")
    def _check_source(self) -> DatasetSpec:
        if self.source in ("csv", "directory"):
            if self.path is None:
                raise ValueError(f"dataset source {self.source!r} needs 'path'")
            for p in (self.path, self.test_path):
                if p is not None and not Path(p).exists():
                    raise ValueError(f"dataset file not found: {p}")
        if self.source == "manifest":
            if self.manifest is None or self.name is None:
                raise ValueError("dataset source 'manifest' needs 'manifest' and 'name'")
            if not Path(self.manifest).is_file():
                raise ValueError(f"manifest not found: {self.manifest}")
        return self


class BenchmarkConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    dataset: DatasetSpec = DatasetSpec()
    models: list[str] = Field(default_factory=lambda: ["lr", "ann"], min_length=1)
    model_paths: dict[str, str] = Field(default_factory=dict)
    train: TrainConfig = TrainConfig()
    explainers: list[str] = Field(
        default_factory=lambda: [
            "random",
            "vanilla_grad",
            "grad_x_input",
            "smoothgrad",
            "integrated_gradients",
            "lime",
            "kernel_shap",
        ],
        min_length=1,
    )
    explainer_config: ExplainerConfig = ExplainerConfig()
    metrics: list[str] = Field(default_factory=lambda: list(ALL_METRICS), min_length=1)
    topk: TopKConfig = TopKConfig()
    perturbation: PerturbationConfig = PerturbationConfig()
    stability: StabilityConfig = StabilityConfig()
    ground_truth: Literal["auto", "model", "data", "none"] = "auto"
    subgroups: Literal["auto", "protected", "cluster", "none"] = "auto"
    max_instances: Optional[int] = Field(default=None, gt=0)
    sort_by: Optional[str] = None
    seed: int = Field(default=0, ge=0, lt=2**64)

    output_dir: str = "results"
    formats: list[str] = Field(default_factory=lambda: list(FORMATS), min_length=1)
    workers: int = Field(default=1, ge=1)
    progress: bool = False

    @field_validator("models")
    @classmethod
    def _check_models(cls, value: list[str]) -> list[str]:
        try:
            families = [canonical_family(v) for v in value]
        except ModelError as e:
            raise ValueError(str(e)) from e
        if len(set(families)) != len(families):
            raise ValueError(f"duplicate model families in {value}")
        return families

    @field_validator("model_paths")
    @classmethod
    def _check_model_paths(cls, value: dict[str, str]) -> dict[str, str]:
        out = {}
        for family, path in value.items():
            try:
                key = canonical_family(family)
            except ModelError as e:
                raise ValueError(str(e)) from e
            if not Path(path).is_file():
                raise ValueError(f"model file not found: {path}")
            out[key] = path
        return out

    @field_validator("explainers")
    @classmethod
    def _check_explainers(cls, value: list[str]) -> list[str]:
        try:
            names = [canonical_name(v) for v in value]
        except ExplainerError as e:
            raise ValueError(str(e)) from e
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate explainers in {value}")
        return names

    @field_validator("metrics")
    @classmethod
    def _check_metrics(cls, value: list[str]) -> list[str]:
        try:
            names = [canonical_metric(v) for v in value]
        except MetricError as e:
            raise ValueError(str(e)) from e
        return list(dict.fromkeys(names))

    @field_validator("sort_by")
    @classmethod
    def _check_sort_by(cls, value: Optional[str]) -> Optional[str]:
        if value is None:
            return None
        try:
            return canonical_metric(value)
        except MetricError as e:
            raise ValueError(str(e)) from e

    @field_validator("formats")
    @classmethod
    def _check_formats(cls, value: list[str]) -> list[str]:
        try:
            return list(dict.fromkeys(canonical_format(v) for v in value))
        except ConfigError as e:
            raise ValueError(str(e)) from e

    def fingerprint(self) -> str:
        """sha256 of everything that determines the computed results."""
        return fingerprint(self.model_dump(mode="json", exclude=set(EXECUTION_FIELDS)))


def load_config(path: Union[str, Path], **overrides: object) -> BenchmarkConfig:
    """Read a config file and apply command-line overrides (None values are ignored)."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"Config file not found: {p}")
    try:
        cfg = BenchmarkConfig.model_validate_json(p.read_bytes())
    except ValidationError as e:
        raise ConfigError(f"Invalid config {p}:\n{e}") from e
    return apply_overrides(cfg, **overrides)


def apply_overrides(cfg: BenchmarkConfig, **overrides: object) -> BenchmarkConfig:
    updates = {k: v for k, v in overrides.items() if v is not None}
    if not updates:
        return cfg
    try:
        return BenchmarkConfig.model_validate({**cfg.model_dump(), **updates})
    except ValidationError as e:
        raise ConfigError(f"Invalid override {updates}:\n{e}") from e
