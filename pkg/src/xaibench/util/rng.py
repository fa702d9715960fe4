# Copyright(c) Microsoft Corporation.
# Licensed under the MIT License.

"""Deterministic, platform-stable random streams.

Every random draw in xaibench comes from a ``numpy.random.Generator`` over the
counter-based Philox bit generator. Streams are keyed by mixing a base seed
with any number of labels (stage names, method names, instance ids), so the
stream an instance sees never depends on evaluation order or worker count.
"""

from __future__ import annotations

from typing import Union

import numpy as np

# Python's hash() is salted per process, so labels are hashed with FNV-1a.
_FNV_OFFSET64 = 0xCBF29CE484222325
_FNV_PRIME64 = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

SeedPart = Union[int, str, bytes]


def _to_bytes(part: SeedPart) -> bytes:
    if isinstance(part, bytes):
        return part
    if isinstance(part, (int, np.integer)):
        return int(int(part) & _MASK64).to_bytes(8, "little", signed=False)
    return str(part).encode("utf-8")


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET64
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME64) & _MASK64
    return h


def mix(base_seed: int, *parts: SeedPart) -> int:
    """Mix a base seed with labels into a 64-bit key.

    The result is identical across processes, platforms and Python versions.
    """
    h = _fnv1a64(_to_bytes(base_seed))
    for part in parts:
        h ^= _fnv1a64(_to_bytes(part))
        h = (h * _FNV_PRIME64) & _MASK64
    return h ^ (h >> 29)


def child_generator(base_seed: int, *parts: SeedPart) -> np.random.Generator:
    """A Philox-backed generator deterministically derived from seed and labels."""
    return np.random.Generator(np.random.Philox(key=mix(base_seed, *parts)))


def gaussian(
    rng: np.random.Generator, size: int | tuple[int, ...]
) -> np.ndarray:
    """Standard normal draws via the Box-Muller transform.

    Uses both the cosine and the sine branch, so ``n`` normals consume
    ``2 * ceil(n / 2)`` uniforms.
    """
    shape = (size,) if isinstance(size, int) else tuple(size)
    count = int(np.prod(shape, dtype=np.int64))
    if count == 0:
        return np.zeros(shape)
    half = (count + 1) // 2
    u1 = rng.random(half)
    u2 = rng.random(half)
    # 1 - u1 lies in (0, 1], keeping the logarithm finite.
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    theta = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(theta), radius * np.sin(theta)])
    return z[:count].reshape(shape)
