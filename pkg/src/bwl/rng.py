"""Seeding policy shared by every randomized component.

All sampling goes through Philox (counter-based, splittable), seeded via
``numpy.random.SeedSequence``. Gaussian variates therefore come from numpy's
ziggurat transform. Both choices are frozen: equal seeds reproduce equal
streams bit-for-bit on a given numpy build, and substreams derived from
distinct tag tuples are statistically independent.
"""

from __future__ import annotations

import numpy as np

__all__ = ["rng_from_seed", "derive_seed"]


def rng_from_seed(seed: int) -> np.random.Generator:
    """Return the canonical generator for a 64-bit unsigned seed."""
    if seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def derive_seed(seed: int, *tags: int) -> int:
    """Derive an independent child seed from a root seed and integer tags.

    Used to give each randomized stage of a run (phases, noise, feature
    weights, per-repetition data) its own stream while keeping a single
    user-facing seed.
    """
    if seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed}")
    ss = np.random.SeedSequence((int(seed),) + tuple(int(t) for t in tags))
    return int(ss.generate_state(1, np.uint64)[0])
