"""Counter-keyed random substreams.

Every random draw in the package comes from a generator keyed by
``(master_seed, *stream)``. Because a stream never depends on how many
draws other streams made, results are independent of iteration order and
of how work is split between processes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_SEED = 20190601

# stream tags, first element of every stream key
DATABASE = 1
TRIAL = 2
CRLB_OBS = 3

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngHandle:
    """A reproducible stream identity: ``seed`` plus a tuple of 64-bit counters."""

    seed: int
    stream: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= self.seed <= _MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "stream", tuple(int(s) & _MASK64 for s in self.stream))

    def child(self, *keys: int) -> "RngHandle":
        return RngHandle(self.seed, self.stream + tuple(keys))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.PCG64(ss))


def substream(seed: int, *keys: int) -> np.random.Generator:
    return RngHandle(seed, keys).generator()


def as_generator(rng) -> np.random.Generator:
    """Accept an RngHandle, a Generator, or an int seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngHandle):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return RngHandle(int(rng)).generator()
    raise TypeError(f"cannot make a generator from {type(rng).__name__}")
