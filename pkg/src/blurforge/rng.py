"""Seeded random number generation.

All randomness in the toolkit flows through numpy ``Generator`` objects
backed by the PCG64 bit generator, so a 64-bit seed fully determines every
output on a given build. Normal variates come from numpy's ziggurat
sampler on top of the PCG64 stream.

Per-item child streams are derived by mixing ``(master_seed, index)``
through the SplitMix64 finalizer, which is injective in the index for a
fixed master seed and avalanches well, so items may be processed in any
order (or in parallel) without changing their outputs.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def make_rng(seed: int) -> np.random.Generator:
    """Create the toolkit's standard generator (PCG64) for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


def derive_item_seed(master_seed: int, index: int) -> int:
    """Mix a master seed and an item index into an independent 64-bit seed.

    SplitMix64: advance the master seed by (index + 1) odd increments of
    the golden-gamma constant, then apply the Stafford mix13 finalizer.
    Both stages are bijections on u64, so the map is injective in
    ``index`` for any fixed ``master_seed``.
    """
    z = (int(master_seed) + (int(index) + 1) * _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def child_rng(master_seed: int, index: int) -> np.random.Generator:
    """Generator for item ``index`` of a run keyed by ``master_seed``."""
    return make_rng(derive_item_seed(master_seed, index))
