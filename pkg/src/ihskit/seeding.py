"""Deterministic random-number streams.

Every source of randomness in the package is a Philox counter-based
generator keyed by a 64-bit master seed plus an integer stream id path,
so independent draws (sketch rounds, Monte Carlo trials, parallel
workers) are reproducible and collision-free regardless of evaluation
order.
"""

from __future__ import annotations

import numpy as np


def derive_rng(seed: int, *stream: int) -> np.random.Generator:
    """Return the generator for stream ``(seed, *stream)``.

    Identical arguments always yield a bit-identical stream; distinct
    stream paths yield statistically independent streams.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))
