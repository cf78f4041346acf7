"""Deterministic random streams.

Every random draw in the package flows through numpy's PCG64 generator,
whose output is specified and identical across platforms for a given
seed. Sub-streams (dataset noise, pool split, per-iteration strategy
draws, shuffling) are derived through ``SeedSequence`` so that no two
roles ever share a stream.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int, *path: int) -> np.random.Generator:
    """PCG64 generator for ``seed``, optionally forked by an integer path.

    Args:
        seed: Base seed, any Python int.
        path: Optional role/iteration coordinates. Distinct paths under the
            same base seed give statistically independent streams.

    Returns:
        A ``numpy.random.Generator`` that is reproducible across runs and
        platforms for the same ``(seed, *path)``.
    """
    entropy = (int(seed), *(int(p) for p in path))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *path: int) -> int:
    """Stable 64-bit sub-seed for a named role under a base seed."""
    entropy = (int(seed), *(int(p) for p in path))
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])
