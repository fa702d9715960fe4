"""Shared helpers: project paths, environment defaults, seeded streams."""

from .fingerprint import canonical_json, fingerprint
from .rng import child_generator, gaussian, mix

__all__ = ["canonical_json", "fingerprint", "child_generator", "gaussian", "mix"]
