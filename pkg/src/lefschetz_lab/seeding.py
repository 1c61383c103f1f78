"""Seeded random streams.

Every consumer draws from a stream keyed by (root seed, label, index), so
adding a new check never shifts the numbers another check sees.
"""
from __future__ import annotations

import zlib

import numpy as np


def _key(label) -> int:
    if isinstance(label, str):
        return zlib.crc32(label.encode())
    return int(label)


def stream(seed: int, *labels) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(_key(x) for x in labels)]))


def fresh_seed() -> int:
    return int(np.random.SeedSequence().entropy % 2**32)
