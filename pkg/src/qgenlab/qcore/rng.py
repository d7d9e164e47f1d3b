"""Seeded counter-based generators with hierarchical key derivation."""

from __future__ import annotations

import zlib

import numpy as np


def _key(k) -> int:
    if isinstance(k, (int, np.integer)):
        return int(k)
    return zlib.crc32(str(k).encode())


def make_rng(seed: int, *keys) -> np.random.Generator:
    """Philox generator for (seed, key path); identical inputs give identical streams."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))
