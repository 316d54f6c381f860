"""Deterministic RNG derivation shared across the package.

Seeds are ints or tuples of ints. Child streams extend the tuple, e.g.
bootstrap replicate ``i`` of an operation seeded with ``s`` draws from
``default_rng((s, i + 1))`` while the full-data pass uses ``(s, 0)``.
Because each stream is fully determined by its tuple, results are
identical whatever the execution order or degree of parallelism.
"""

from __future__ import annotations

import numpy as np


def seed_tuple(seed) -> tuple[int, ...]:
    if isinstance(seed, (int, np.integer)):
        return (int(seed),)
    return tuple(int(s) for s in seed)


def spawn(seed, *children: int) -> np.random.Generator:
    """Generator for the child stream ``seed + children``."""
    return np.random.default_rng(seed_tuple(seed) + tuple(children))
