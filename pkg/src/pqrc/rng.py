"""Reproducible stream derivation.

Child seeds are derived from a master seed and an integer path (for example
``(point_index, realization_index)``) through iterated splitmix64 mixing.
The derivation depends only on the path, never on draw order or worker
count, which is what makes parallel sweeps bitwise reproducible.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(z: int) -> int:
    """One splitmix64 output step (Steele/Lea/Flood finalizer)."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def child_seed(master_seed: int, *path: int) -> int:
    """Mix integer path components into the master seed, one splitmix step each."""
    s = master_seed & _MASK64
    for component in path:
        s = splitmix64(s ^ (int(component) & _MASK64))
    return s


def make_rng(seed: int) -> np.random.Generator:
    """The repo-wide generator: 64-bit-seeded PCG64."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def spawn_rng(master_seed: int, *path: int) -> np.random.Generator:
    return make_rng(child_seed(master_seed, *path))
