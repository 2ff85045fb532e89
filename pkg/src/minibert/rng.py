"""Seed derivation and the pinned pseudo-random generator.

All randomness in the package flows through ``derive_rng``: a SHA-256 hash of
the root seed plus a tuple of stream tags keys a Philox 4x64 counter-based bit
generator.  Philox raw streams are fixed by NumPy's stream-compatibility
policy, so identical (seed, tags) reproduce identical draws across runs,
platforms, and thread schedules.  Distinct tag tuples give independent
streams, which is what lets epoch-0 candidate models train concurrently
without sharing generator state.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_key(seed: int, *tags: object) -> int:
    """Map (seed, tags) to a 128-bit integer key via SHA-256."""
    material = repr((int(seed),) + tags).encode("utf-8")
    digest = hashlib.sha256(material).digest()
    return int.from_bytes(digest[:16], "little")


def derive_rng(seed: int, *tags: object) -> np.random.Generator:
    """Independent Philox generator for the stream named by (seed, tags)."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, *tags)))


def derive_seed(seed: int, *tags: object) -> int:
    """Derived 63-bit seed, used for per-model data seeds in multi training."""
    return derive_key(seed, *tags) & 0x7FFFFFFFFFFFFFFF
