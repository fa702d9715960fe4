"""Command-line entry point: ``xaibench <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import NoReturn, Optional

from pydantic import ValidationError

from ..datasets import (
    DatasetError,
    SynthConfig,
    fetch_dataset,
    find_entry,
    generate_synthetic,
    load_manifest,
    save_dataset,
)
from ..explainers import ExplainerError
from ..metrics import MetricError
from ..models import ModelError, save_model
from ..util.env import XAIBENCH_CACHE_DIR, XAIBENCH_LOG_LEVEL
from .config import BenchmarkConfig, ConfigError, apply_overrides, canonical_format, load_config
from .leaderboard import emit_leaderboard, read_leaderboard_csv, read_leaderboard_json
from .runner import BenchmarkError, BenchmarkRunner

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
RUNTIME_ERRORS = (BenchmarkError, DatasetError, ModelError, ExplainerError, MetricError)


class UsageError(Exception):
    """Bad command-line arguments."""

    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _formats(value: str) -> list[str]:
    try:
        return [canonical_format(v) for v in value.split(",") if v]
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Benchmark config JSON file")
    common.add_argument("--seed", type=int, help="Master seed (overrides the config)")
    common.add_argument("--out", help="Output directory (overrides the config)")
    common.add_argument(
        "--format", type=_formats, help="Comma-separated output formats: markdown,csv,json"
    )
    common.add_argument("--workers", type=int, help="Worker threads over test instances")
    common.add_argument("--log-level", default=None, help="Log level (default: XAIBENCH_LOG_LEVEL or INFO)")
    common.add_argument("--progress", action="store_true", help="Show progress bars")

    parser = _Parser(prog="xaibench", description="Benchmark post hoc feature attributions")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("generate", parents=[common], help="Generate a synthetic Gaussian-cluster dataset")

    fetch = sub.add_parser("fetch", parents=[common], help="Fetch a dataset listed in a manifest")
    fetch.add_argument("--manifest", help="Manifest JSON file")
    fetch.add_argument("--name", help="Dataset name in the manifest")

    sub.add_parser("train", parents=[common], help="Train (or load) the configured models")
    sub.add_parser("explain", parents=[common], help="Explain the test instances with every method")

    evaluate = sub.add_parser("evaluate", parents=[common], help="Score explanations with every metric")
    evaluate.add_argument("--explanations", help="explanations.csv produced by the explain subcommand")

    sub.add_parser("benchmark", parents=[common], help="Run the full benchmark and emit the leaderboard")

    board = sub.add_parser("leaderboard", parents=[common], help="Re-render an existing leaderboard")
    board.add_argument("input", help="leaderboard.json or leaderboard.csv")
    return parser


def _configure_logging(level: Optional[str]) -> None:
    logging.basicConfig(
        level=(level or XAIBENCH_LOG_LEVEL).upper(),
        format="%(asctime)s.%(msecs)03d - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def _benchmark_config(args: argparse.Namespace) -> BenchmarkConfig:
    overrides = {
        "seed": args.seed,
        "output_dir": args.out,
        "formats": args.format,
        "workers": args.workers,
        "progress": args.progress or None,
    }
    if args.config is None:
        return apply_overrides(BenchmarkConfig(), **overrides)
    return load_config(args.config, **overrides)


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    synth = SynthConfig()
    if args.config is not None:
        p = Path(args.config)
        if not p.is_file():
            raise ConfigError(f"Config file not found: {p}")
        try:
            data = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config {p} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"Config {p} must hold a JSON object")
        if "dataset" in data:
            synth = BenchmarkConfig.model_validate(data).dataset.synthetic
        else:
            synth = SynthConfig.model_validate(data)
    if args.seed is not None:
        synth = SynthConfig.model_validate({**synth.model_dump(), "seed": args.seed})
    dataset, truth = generate_synthetic(synth)
    out = Path(args.out or "data/synthetic")
    for path in save_dataset(dataset, out, truth):
        logger.info(f"Wrote {path}")
    return EXIT_OK


def cmd_fetch(args: argparse.Namespace) -> int:
    manifest, name = args.manifest, args.name
    cache_dir = args.out or XAIBENCH_CACHE_DIR
    if manifest is None:
        cfg = _benchmark_config(args)
        if cfg.dataset.source != "manifest":
            raise ConfigError("fetch needs --manifest and --name, or a config with a manifest dataset")
        manifest, name, cache_dir = cfg.dataset.manifest, cfg.dataset.name, args.out or cfg.dataset.cache_dir
    if name is None:
        raise ConfigError("fetch needs --name")
    entry = find_entry(load_manifest(manifest), name)
    path = fetch_dataset(entry, cache_dir, progress=args.progress)
    print(path)
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _benchmark_config(args)
    runner = BenchmarkRunner(cfg)
    out = Path(cfg.output_dir) / "models"
    for family in cfg.models:
        model = runner.prepare_model(family)
        save_model(model, out / f"{family}.json")
        acc = model.accuracy(runner.split.test_X, runner.split.test_y)
        print(f"{family}: test accuracy {acc:.4f}")
    return EXIT_OK


def cmd_explain(args: argparse.Namespace) -> int:
    cfg = _benchmark_config(args)
    runner = BenchmarkRunner(cfg)
    for family in cfg.models:
        for method in cfg.explainers:
            runner.explain(family, method)
    print(runner.write_explanations(cfg.output_dir))
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _benchmark_config(args)
    runner = BenchmarkRunner(cfg)
    if args.explanations is not None:
        if not Path(args.explanations).is_file():
            raise ConfigError(f"Explanations file not found: {args.explanations}")
        runner.use_explanations(args.explanations)
    runner.run()
    for path in runner.write_outputs():
        print(path)
    return EXIT_OK


def cmd_benchmark(args: argparse.Namespace) -> int:
    return cmd_evaluate(argparse.Namespace(**{**vars(args), "explanations": None}))


def cmd_leaderboard(args: argparse.Namespace) -> int:
    src = Path(args.input)
    if not src.is_file():
        raise ConfigError(f"Leaderboard file not found: {src}")
    tables = read_leaderboard_csv(src) if src.suffix == ".csv" else read_leaderboard_json(src)
    out = Path(args.out) if args.out else src.parent
    for fmt in args.format or ["markdown"]:
        print(emit_leaderboard(tables, fmt, out))
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "fetch": cmd_fetch,
    "train": cmd_train,
    "explain": cmd_explain,
    "evaluate": cmd_evaluate,
    "benchmark": cmd_benchmark,
    "leaderboard": cmd_leaderboard,
}


def cli_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the subcommand and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_VALIDATION
    _configure_logging(args.log_level)

    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValidationError, UsageError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_VALIDATION
    except RUNTIME_ERRORS as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_RUNTIME
    except Exception as e:
        logger.exception(f"{args.command} failed unexpectedly: {e}")
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(cli_dispatch())
