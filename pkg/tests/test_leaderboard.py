"""Tests for leaderboard tables and their renderings."""

import pytest

from xaibench.harness import (
    ConfigError,
    LeaderboardTable,
    emit_leaderboard,
    read_leaderboard_csv,
    read_leaderboard_json,
    render_markdown,
)
from xaibench.metrics import MetricResult


def _table(methods=("grad", "lime"), sort_by=None):
    cells = {}
    values = {"grad": (0.1, 0.3, 0.9), "lime": (0.2, 0.25, 0.8)}
    for method in methods:
        pgu, pgi, fa = values[method]
        cells[(method, "PGU")] = MetricResult("PGU", pgu, 0.01, 10)
        cells[(method, "PGI")] = MetricResult("PGI", pgi, 0.02, 10)
        cells[(method, "FA")] = MetricResult("FA", fa, 1 / 3, 9, n_undefined=1)
        cells[(method, "RIS")] = MetricResult.undefined("RIS", "no same-prediction neighbour", 10)
    return LeaderboardTable(
        dataset="synthetic",
        model="lr",
        methods=list(methods),
        metrics=["PGU", "PGI", "FA", "RIS"],
        cells=cells,
        sort_by=sort_by,
        metadata={"fingerprint": "abc", "seed": 0},
    )


class TestLeaderboardTable:
    """Best cells and ordering."""

    def test_best_respects_direction(self) -> None:
        """Lower PGU and higher PGI win."""
        t = _table()
        assert t.best("PGU") == {"grad"}
        assert t.best("PGI") == {"grad"}
        assert t.best("FA") == {"grad"}

    def test_single_method_has_no_best(self) -> None:
        """Nothing is bolded with one defined cell."""
        assert _table(methods=("lime",)).best("PGU") == set()

    def test_undefined_cells_never_best(self) -> None:
        """Undefined metrics have no winner."""
        assert _table().best("RIS") == set()

    def test_sort_by(self) -> None:
        """Rows follow the sort metric in its preferred direction."""
        assert _table(sort_by="PGU").ordered_methods() == ["grad", "lime"]
        t = _table(sort_by="PGU")
        t.cells[("lime", "PGU")] = MetricResult("PGU", 0.05, 0.01, 10)
        assert t.ordered_methods() == ["lime", "grad"]

    def test_missing_cell(self) -> None:
        """Cells that were never computed read as undefined."""
        assert not _table().cell("grad", "RC").defined


class TestRendering:
    """Markdown, CSV and JSON."""

    def test_markdown_cells(self) -> None:
        """Mean and stderr at four decimals with the best cell bold."""
        text = render_markdown([_table()])
        assert "## synthetic / lr" in text
        assert "| method | PGU ↓ | PGI ↑ | FA ↑ | RIS ↓ |" in text
        assert "**0.1000 ± 0.0100**" in text
        assert "| lime | 0.2000 ± 0.0100 |" in text
        assert "0.9000 ± 0.3333" in text
        assert "(1 undef.)" in text

    def test_markdown_undefined_note(self) -> None:
        """Undefined cells show n/a and their reason below the table."""
        text = render_markdown([_table()])
        assert "| n/a |" in text
        assert "- n/a RIS: no same-prediction neighbour" in text

    def test_markdown_single_method_unbolded(self) -> None:
        """A one-row table has no bold cells."""
        assert "**" not in render_markdown([_table(methods=("grad",))])

    def test_json_round_trip(self, tmp_path) -> None:
        """A leaderboard read back from JSON re-renders identically."""
        path = emit_leaderboard([_table()], "json", tmp_path)
        back = read_leaderboard_json(path)
        assert [t.to_dict() for t in back] == [_table().to_dict()]
        assert emit_leaderboard(back, "json", tmp_path / "again").read_bytes() == path.read_bytes()

    def test_csv_round_trip(self, tmp_path) -> None:
        """The long CSV keeps every cell."""
        path = emit_leaderboard(_table(), "csv", tmp_path)
        assert path.name == "leaderboard.csv"
        (back,) = read_leaderboard_csv(path)
        assert back.methods == ["grad", "lime"]
        assert back.metrics == ["PGU", "PGI", "FA", "RIS"]
        for key, cell in _table().cells.items():
            assert back.cells[key] == cell

    def test_markdown_alias(self, tmp_path) -> None:
        """md is accepted for markdown."""
        assert emit_leaderboard(_table(), "md", tmp_path).name == "leaderboard.md"

    def test_unknown_format(self, tmp_path) -> None:
        """Unsupported formats are rejected."""
        with pytest.raises(ConfigError):
            emit_leaderboard(_table(), "xlsx", tmp_path)

    def test_deterministic_bytes(self, tmp_path) -> None:
        """Rendering twice gives identical files."""
        a = emit_leaderboard(_table(), "markdown", tmp_path / "a").read_bytes()
        b = emit_leaderboard(_table(), "markdown", tmp_path / "b").read_bytes()
        assert a == b
