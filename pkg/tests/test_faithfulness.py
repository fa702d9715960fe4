"""Tests for neighbourhood perturbation and prediction gaps."""

import numpy as np
import pytest
from scipy.integrate import trapezoid

from tests.conftest import ConstantModel, LinearScoreModel
from xaibench.metrics import (
    MetricError,
    PerturbationConfig,
    apply_perturbations,
    draw_perturbations,
    perturb_instance,
    prediction_gap,
    prediction_gap_auc,
    prediction_gap_curve,
)
from xaibench.util import child_generator


class TestPerturbation:
    """Gaussian noise and binary flips."""

    def test_empty_mask_is_identity(self, rng) -> None:
        """Nothing outside the mask changes."""
        x = np.array([1.0, 0.0, 2.5])
        out = perturb_instance(x, np.zeros(3, dtype=bool), rng, n=5)
        np.testing.assert_array_equal(out, np.tile(x, (5, 1)))

    def test_flip_all_binary(self, rng) -> None:
        """With flip_percentage 1 every binary feature flips."""
        x = np.array([1.0, 0.0, 0.5])
        cfg = PerturbationConfig(flip_percentage=1.0)
        out = perturb_instance(x, np.ones(3, dtype=bool), rng, cfg, np.array([True, True, False]), n=4)
        np.testing.assert_array_equal(out[:, 0], 0.0)
        np.testing.assert_array_equal(out[:, 1], 1.0)
        assert (out[:, 2] != 0.5).all()

    def test_binary_never_gets_noise(self, rng) -> None:
        """Binary features stay in {0, 1}."""
        x = np.array([1.0, 0.0])
        out = perturb_instance(x, np.ones(2, dtype=bool), rng, binary_mask=np.array([True, True]), n=200)
        assert np.isin(out, (0.0, 1.0)).all()

    def test_noise_scale(self, rng) -> None:
        """Continuous offsets have the configured std."""
        out = perturb_instance(np.zeros(2), np.ones(2, dtype=bool), rng, n=20000)
        assert out.std() == pytest.approx(0.05, rel=0.05)

    def test_single_draw_is_vector(self, rng) -> None:
        """n=1 returns one perturbed vector."""
        assert perturb_instance(np.zeros(3), np.ones(3, dtype=bool), rng, n=1).shape == (3,)

    def test_mask_shape_checked(self, rng) -> None:
        """Masks must cover every feature."""
        draw = draw_perturbations(rng, 2, 3, PerturbationConfig())
        with pytest.raises(MetricError):
            apply_perturbations(np.zeros(3), draw, np.ones(2, dtype=bool))


class TestPredictionGap:
    """PGI and PGU."""

    def test_constant_model(self) -> None:
        """A constant model has zero gap for every k."""
        model = ConstantModel(4)
        e = np.array([0.4, -0.1, 0.3, 0.2])
        for mode in ("PGI", "PGU"):
            np.testing.assert_array_equal(prediction_gap_curve(model, np.ones(4), e, mode, seed=1), 0.0)

    def test_pgu_at_full_k(self, small_lr) -> None:
        """Keeping every feature leaves nothing to perturb."""
        e = np.linspace(1, 2, 6)
        assert prediction_gap(small_lr, np.ones(6), e, 6, "PGU", seed=3) == 0.0

    def test_matches_direct_recomputation(self, small_lr) -> None:
        """The gap equals a direct Monte-Carlo average over the same draws."""
        x = np.linspace(-1, 1, 6)
        e = np.array([0.1, -0.9, 0.3, 0.0, 0.5, -0.2])
        cfg = PerturbationConfig(n_perturbations=50)
        cls = int(small_lr.predict(x))
        draw = draw_perturbations(child_generator(8, "prediction_gap"), 50, 6, cfg)
        mask = np.zeros(6, dtype=bool)
        mask[[1, 4]] = True
        neighbours = x + draw.noise * mask
        expected = np.mean(np.abs(small_lr.class_probability(x, cls) - small_lr.class_probability(neighbours, cls)))
        assert prediction_gap(small_lr, x, e, 2, "PGI", cfg, seed=8) == pytest.approx(expected, rel=1e-12)

    def test_important_features_move_prediction_more(self) -> None:
        """Perturbing the largest coefficient beats perturbing the rest."""
        v = np.array([3.0, 1.0, -0.5, 0.2])
        model = LinearScoreModel(v, c=1.0)
        cfg = PerturbationConfig(n_perturbations=4000)
        x = np.zeros(4)
        pgi = prediction_gap(model, x, v, 1, "PGI", cfg, seed=2)
        pgu = prediction_gap(model, x, v, 1, "PGU", cfg, seed=2)
        assert pgi > pgu

    @pytest.mark.parametrize("mode,sign", [("PGU", 1.0), ("PGI", -1.0)])
    def test_curve_monotone_in_k(self, small_lr, rng, mode, sign) -> None:
        """Over many instances PGU falls and PGI rises with k, up to three standard errors."""
        X = rng.normal(size=(200, 6))
        curves = np.array(
            [
                prediction_gap_curve(small_lr, x, small_lr.input_gradient(x, 1), mode, seed=i)
                for i, x in enumerate(X)
            ]
        )
        steps = sign * np.diff(curves, axis=1)
        bound = 3.0 * steps.std(axis=0, ddof=1) / np.sqrt(len(X))
        assert (steps.mean(axis=0) <= bound).all()

    def test_curve_shares_draws(self, small_lr) -> None:
        """Each point of the curve equals the single-k gap."""
        x, e = np.ones(6), np.arange(6.0)
        curve = prediction_gap_curve(small_lr, x, e, "PGI", seed=5)
        for k in range(1, 7):
            assert curve[k - 1] == prediction_gap(small_lr, x, e, k, "PGI", seed=5)
        assert prediction_gap_auc(small_lr, x, e, "PGI", seed=5) == pytest.approx(trapezoid(curve) / 5)

    def test_bad_mode(self, small_lr) -> None:
        """Only PGI and PGU are gap modes."""
        with pytest.raises(MetricError):
            prediction_gap(small_lr, np.ones(6), np.ones(6), 1, "FA")

    def test_explanation_width(self, small_lr) -> None:
        """The explanation must match the model width."""
        with pytest.raises(MetricError):
            prediction_gap(small_lr, np.ones(6), np.ones(5), 1)
