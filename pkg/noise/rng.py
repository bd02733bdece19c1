"""
Counter-based Gaussian streams.

Every draw is addressed by (seed, layer, tag, trial, timestep). Trials are
grouped into fixed blocks of ``block_size`` rows; each (layer, tag, block,
timestep) owns a Philox key derived through SeedSequence, so a draw depends
only on its coordinates and never on the order in which blocks are
generated or on how trials are split between workers.
"""

import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Union

import numpy as np

from core.exceptions import NoiseSpecError

logger = logging.getLogger(__name__)

TRIAL_BLOCK = 1024


class NoiseTag(IntEnum):
    """Stream tag of each noise source in a layer."""
    ADDITIVE_CORRELATED = 0
    ADDITIVE_UNCORRELATED = 1
    MULTIPLICATIVE_CORRELATED = 2
    MULTIPLICATIVE_UNCORRELATED = 3


@dataclass(frozen=True)
class RngStream:
    """Deterministic source of unit Gaussian draws keyed on coordinates."""
    seed: int
    block_size: int = TRIAL_BLOCK

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise NoiseSpecError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.block_size < 1:
            raise NoiseSpecError(f"block_size must be positive, got {self.block_size}")
        object.__setattr__(self, 'seed', int(self.seed))

    def generator(self, layer: int, tag: int, block: int, timestep: int) -> np.random.Generator:
        """Philox generator owning one block of trials."""
        entropy = [self.seed, int(layer), int(tag), int(block), int(timestep)]
        key = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def block(self, layer: int, tag: int, block: int, timestep: int, width: int) -> np.ndarray:
        return self.generator(layer, tag, block, timestep).standard_normal((self.block_size, width))

    def normals(self, layer: int, tag: int, trials: Union[int, np.ndarray],
                timestep: int, width: int) -> np.ndarray:
        """
        Unit Gaussian draws for a set of trials.

        Args:
            layer: layer index
            tag: NoiseTag of the source
            trials: trial indices (non-negative)
            timestep: timestep / input coordinate
            width: number of draws per trial (1 for correlated sources)

        Returns:
            Array of shape (len(trials), width); row r belongs to trials[r].
        """
        trials = np.atleast_1d(np.asarray(trials, dtype=np.int64))
        if trials.size and trials.min() < 0:
            raise NoiseSpecError("trial indices must be non-negative")
        out = np.empty((trials.size, width))
        blocks = trials // self.block_size
        rows = trials % self.block_size
        for b in np.unique(blocks):
            selected = blocks == b
            out[selected] = self.block(layer, tag, int(b), timestep, width)[rows[selected]]
        return out
