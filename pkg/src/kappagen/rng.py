"""Seeded random streams.

Every sampler draws from a PCG64 bit generator seeded through
``numpy.random.SeedSequence``. Independent child streams (bootstrap
replicates, component choices in the mixture sampler) come from
``SeedSequence.spawn`` so that a run split over workers reproduces the
sequential run exactly.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed) -> np.random.Generator:
    """Return a PCG64 generator for an integer seed (or pass a generator through)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_rngs(seed, n: int) -> list[np.random.Generator]:
    """``n`` independent generators derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]
