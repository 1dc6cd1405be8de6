"""Deterministic RNG stream derivation.

Every replication gets its own generator derived from (seed, stream ids),
so serial and worker-pool runs of the same experiment produce identical
statistics.
"""

from __future__ import annotations

import numpy as np


def derive_rng(seed: int, *stream: int) -> np.random.Generator:
    """Generator for a (seed, stream...) address; same address, same draws."""
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    if any(s < 0 for s in stream):
        raise ValueError("stream ids must be nonnegative integers")
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(stream)))


class SeededRng:
    """(seed, stream) pair naming one reproducible draw sequence."""

    __slots__ = ("seed", "stream")

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)

    def generator(self, *sub: int) -> np.random.Generator:
        return derive_rng(self.seed, self.stream, *sub)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed}, stream={self.stream})"
