"""Reproducible random streams.

Uniforms come from numpy's counter-based Philox bit generator; normals are
produced here by Box-Muller so that the draws do not depend on numpy's
choice of normal sampler.
"""

from __future__ import annotations

import numpy as np


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def derive_seed(*parts: int) -> int:
    """Collision-resistant child seed for a tuple of nonnegative ints."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(2, np.uint64)[0])


def standard_normal(rng: np.random.Generator, count: int) -> np.ndarray:
    half = (count + 1) // 2
    u1 = 1.0 - rng.random(half)  # (0, 1]
    u2 = rng.random(half)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    return np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:count]
