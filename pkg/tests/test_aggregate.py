"""Tests for aggregation, subgroup disparity, metric names and the evaluator."""

import math

import numpy as np
import pytest

from tests.conftest import LinearScoreModel
from xaibench.explainers import make_explainer
from xaibench.metrics import (
    ALL_METRICS,
    Evaluator,
    MetricError,
    MetricResult,
    PerturbationConfig,
    StabilityConfig,
    TopKConfig,
    aggregate,
    canonical_metric,
    disparity_result,
    higher_is_better,
    subgroup_disparity,
)


class TestAggregate:
    """Mean and standard error."""

    def test_constant_scores(self) -> None:
        """[1, 1, 1] has mean 1 and standard error 0."""
        r = aggregate(np.ones(3), "FA")
        assert (r.mean, r.stderr, r.n) == (1.0, 0.0, 3)

    def test_two_points(self) -> None:
        """[0, 1] has mean 0.5 and standard error 0.5."""
        r = aggregate(np.array([0.0, 1.0]))
        assert r.mean == pytest.approx(0.5)
        assert r.stderr == pytest.approx(0.5)

    def test_single_score(self) -> None:
        """One score has zero standard error."""
        assert aggregate(np.array([0.3])).stderr == 0.0

    def test_undefined_excluded(self) -> None:
        """NaN scores are left out and counted."""
        r = aggregate(np.array([1.0, np.nan, 3.0]), "RIS", "no same-prediction neighbour")
        assert r.mean == 2.0
        assert (r.n, r.n_undefined) == (2, 1)
        assert r.reason == "no same-prediction neighbour"

    def test_all_undefined(self) -> None:
        """Only NaN scores make the metric undefined."""
        r = aggregate(np.array([np.nan, np.nan]), "ROS")
        assert not r.defined
        assert r.n_undefined == 2

    def test_result_dict(self) -> None:
        """Undefined numbers serialize as None and parse back."""
        r = MetricResult.undefined("PGI", "no instances")
        data = r.to_dict()
        assert data["mean"] is None
        assert MetricResult.from_dict(data) == r


class TestDisparity:
    """Majority/minority gaps."""

    def test_identical_groups(self) -> None:
        """Identical score lists give zero disparity."""
        assert subgroup_disparity(np.array([0.5, 0.5, 0.5, 0.5]), np.array([0, 0, 1, 1]))[2] == 0.0

    def test_gap(self) -> None:
        """Group means 0.6 and 0.4 differ by 0.2."""
        major, minor, gap = subgroup_disparity(np.array([0.6, 0.6, 0.6, 0.4]), np.array([1, 1, 1, 0]))
        assert (major, minor) == pytest.approx((0.6, 0.4))
        assert gap == pytest.approx(0.2)

    def test_tie_goes_to_group_zero(self) -> None:
        """With equal group sizes group 0 is the majority."""
        major, minor, _ = subgroup_disparity(np.array([1.0, 3.0]), np.array([1, 0]))
        assert (major, minor) == (3.0, 1.0)

    def test_stderr_combines_groups(self) -> None:
        """The disparity stderr is the root sum of squares of both groups."""
        scores = np.array([0.0, 1.0, 2.0, 4.0])
        r = disparity_result(scores, np.array([0, 0, 1, 1]), "PGU")
        assert r.metric == "PGU_disparity"
        assert r.mean == pytest.approx(2.5)
        assert r.stderr == pytest.approx(math.sqrt(0.5**2 + 1.0**2))

    def test_empty_subgroup_undefined(self) -> None:
        """A group without defined scores yields an undefined result."""
        r = disparity_result(np.array([0.2, np.nan]), np.array([0, 1]), "RC")
        assert not r.defined
        assert "Empty subgroup" in r.reason

    def test_non_binary_labels(self) -> None:
        """Group labels must be 0 or 1."""
        with pytest.raises(MetricError):
            subgroup_disparity(np.array([1.0, 2.0]), np.array([0, 2]))


class TestMetricNames:
    """The 22 metric names."""

    def test_count(self) -> None:
        """Eleven base metrics plus one disparity each."""
        assert len(ALL_METRICS) == 22

    def test_canonical(self) -> None:
        """Case and suffix spelling are normalised."""
        assert canonical_metric("pgi") == "PGI"
        assert canonical_metric("rc_Disparity") == "RC_disparity"
        with pytest.raises(MetricError):
            canonical_metric("FA_mean")

    def test_direction(self) -> None:
        """Agreement and PGI are maximised; the rest are minimised."""
        assert higher_is_better("FA") and higher_is_better("PGI")
        assert not higher_is_better("PGU")
        assert not higher_is_better("RIS")
        assert not higher_is_better("FA_disparity")


class TestEvaluator:
    """Scoring a method over several instances."""

    def _evaluator(self, **kwargs):
        v = np.array([2.0, -1.0, 0.5])
        model = LinearScoreModel(v, c=0.5)
        X = np.array([[0.1, 0.2, 0.3], [0.5, -0.5, 0.0], [1.0, 1.0, 1.0], [0.0, 0.3, 0.1]])
        explainer = make_explainer("grad", model)
        E = np.vstack([explainer.explain(x, target=1).attributions for x in X])
        defaults = dict(
            model=model,
            inputs=X,
            explanations=E,
            explainer=explainer,
            ground_truth=v,
            groups=np.array([0, 0, 1, 1]),
            perturbation=PerturbationConfig(n_perturbations=20),
            stability=StabilityConfig(n_neighbors=10),
        )
        defaults.update(kwargs)
        return Evaluator(**defaults)

    def test_perfect_agreement(self) -> None:
        """Explaining with the true weights scores 1 on every agreement metric."""
        ev = self._evaluator()
        for metric in ("FA", "RA", "SA", "SRA", "RC", "PRA"):
            assert ev.eval(metric).mean == pytest.approx(1.0)
            assert ev.eval(metric).stderr == pytest.approx(0.0)

    def test_disparity_reuses_scores(self) -> None:
        """Disparity metrics are computed from the cached base scores."""
        ev = self._evaluator()
        base = ev.eval("PGI")
        disparity = ev.eval("PGI_disparity")
        expected = abs(np.mean(base.scores[:2]) - np.mean(base.scores[2:]))
        assert disparity.mean == pytest.approx(expected)

    def test_without_ground_truth(self) -> None:
        """Agreement metrics are undefined with a reason when no ground truth exists."""
        ev = self._evaluator(ground_truth=None, ground_truth_reason="no ground truth for ann")
        r = ev.eval("FA")
        assert not r.defined
        assert r.reason == "no ground truth for ann"
        assert ev.eval("PGU").defined

    def test_without_groups(self) -> None:
        """Disparity needs subgroup labels."""
        assert not self._evaluator(groups=None).eval("RIS_disparity").defined

    def test_single_k(self) -> None:
        """A fixed k scores the single-k value."""
        ev = self._evaluator(topk=TopKConfig(k=1, aggregate_over_k=False))
        assert ev.eval("FA").mean == 1.0

    def test_eval_all_keys(self) -> None:
        """Every requested metric is returned under its canonical name."""
        results = self._evaluator().eval_all(["fa", "pgu_disparity", "ROS"])
        assert list(results) == ["FA", "PGU_disparity", "ROS"]

    def test_shape_mismatch(self) -> None:
        """Explanations must line up with inputs."""
        with pytest.raises(MetricError):
            self._evaluator(explanations=np.zeros((2, 3)))
