"""Tests for seeded streams and fingerprints."""

import numpy as np

from xaibench.util import canonical_json, child_generator, fingerprint, gaussian, mix


class TestMix:
    """Seed mixing."""

    def test_stable_value(self) -> None:
        """Mixing is a pure function of its inputs."""
        assert mix(0, "explain", 3) == mix(0, "explain", 3)

    def test_labels_matter(self) -> None:
        """Different labels or orders give different keys."""
        assert mix(0, "a", "b") != mix(0, "b", "a")
        assert mix(0, "a") != mix(1, "a")
        assert mix(0, 1) != mix(0, "1")

    def test_fits_64_bits(self) -> None:
        """Keys are unsigned 64-bit integers."""
        assert 0 <= mix(2**64 - 1, "x", -1) < 2**64


class TestStreams:
    """Philox child generators and Box-Muller normals."""

    def test_child_generator_reproducible(self) -> None:
        """One key gives one stream."""
        a = child_generator(5, "noise").random(4)
        b = child_generator(5, "noise").random(4)
        np.testing.assert_array_equal(a, b)

    def test_gaussian_shape_and_moments(self) -> None:
        """Odd sizes are trimmed and moments are standard."""
        z = gaussian(child_generator(1), (5001,))
        assert z.shape == (5001,)
        assert abs(z.mean()) < 0.05
        assert abs(z.std() - 1.0) < 0.05

    def test_gaussian_empty(self) -> None:
        """Zero draws give an empty array."""
        assert gaussian(child_generator(1), (0, 3)).shape == (0, 3)


class TestFingerprint:
    """Canonical JSON digests."""

    def test_key_order_irrelevant(self) -> None:
        """Dicts with permuted keys share a fingerprint."""
        assert fingerprint({"a": 1, "b": [1, 2]}) == fingerprint({"b": [1, 2], "a": 1})

    def test_compact(self) -> None:
        """No insignificant whitespace."""
        assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'
