from .cli import cli_dispatch, main
from .config import BenchmarkConfig, ConfigError, DatasetSpec, apply_overrides, load_config
from .leaderboard import (
    LeaderboardTable,
    emit_leaderboard,
    leaderboard_frame,
    read_leaderboard_csv,
    read_leaderboard_json,
    render_csv,
    render_json,
    render_markdown,
)
from .runner import BenchmarkError, BenchmarkRunner, load_benchmark_dataset, run_benchmark

__all__ = [
    "BenchmarkConfig",
    "BenchmarkError",
    "BenchmarkRunner",
    "ConfigError",
    "DatasetSpec",
    "LeaderboardTable",
    "apply_overrides",
    "cli_dispatch",
    "emit_leaderboard",
    "leaderboard_frame",
    "load_benchmark_dataset",
    "load_config",
    "main",
    "read_leaderboard_csv",
    "read_leaderboard_json",
    "render_csv",
    "render_json",
    "render_markdown",
    "run_benchmark",
]
