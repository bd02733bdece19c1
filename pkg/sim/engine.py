"""
Monte Carlo Engine

Noisy forward passes over batches of trials. Every layer's noise is drawn
from the counter-based RngStream at coordinates (layer, tag, trial,
timestep), so the result of a trial does not depend on which batch or
worker computed it. run_trials splits the trials into RNG blocks,
evaluates them with joblib and concatenates the blocks in trial order.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Union

import numpy as np
from joblib import Parallel, delayed

from core.exceptions import SimulationError
from core.topology import (
    NetworkTopology,
    activate,
    ensure_valid,
    input_preactivation,
    preactivation,
    read_out,
)
from noise.noise_model import NoiseSpec, apply_layer_noise
from noise.rng import TRIAL_BLOCK, RngStream

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 300
DEFAULT_SWEEP_INPUTS = 1000


@dataclass
class SimConfig:
    """
    Monte Carlo settings.

    ``inputs`` holds explicit input vectors; when it is None the sweep uses
    ``n_inputs`` uniform draws from [0, 1].
    """
    k: int = DEFAULT_TRIALS
    seed: int = 0
    inputs: Optional[np.ndarray] = None
    n_inputs: int = DEFAULT_SWEEP_INPUTS
    threads: int = 1
    analytic: bool = True

    def validate(self) -> List[str]:
        errors = []
        if self.k < 2:
            errors.append(f"k must be at least 2, got {self.k}")
        if self.seed < 0:
            errors.append(f"seed must be non-negative, got {self.seed}")
        if self.inputs is None and self.n_inputs < 1:
            errors.append(f"n_inputs must be positive, got {self.n_inputs}")
        if self.threads == 0 or self.threads < -1:
            errors.append(f"threads must be positive or -1, got {self.threads}")
        return errors

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'seed': self.seed,
            'inputs': None if self.inputs is None else np.asarray(self.inputs).tolist(),
            'n_inputs': self.n_inputs,
            'threads': self.threads,
            'analytic': self.analytic,
        }


def _layer_noise(x: np.ndarray, spec: NoiseSpec, rng: RngStream, layer: int,
                 trials: np.ndarray, timestep: int) -> np.ndarray:
    # noise-free layers stay a single shared row until the readout
    if spec.is_noiseless or not spec.enabled(layer):
        return x
    return apply_layer_noise(x, spec, rng, layer, trials, timestep)


def noisy_forward(net: NetworkTopology, inputs: np.ndarray, spec: NoiseSpec, rng: RngStream,
                  trials: Union[int, np.ndarray], timestep: int = 0) -> np.ndarray:
    """
    Noisy network outputs for a batch of trials.

    Args:
        net: validated network
        inputs: one input vector shared by every trial, or one row per trial
        spec: noise intensities and noisy-layer mask
        rng: counter-based stream
        trials: trial indices
        timestep: timestep coordinate shared by the batch

    Returns:
        Array of shape (T, output_dim).
    """
    trials = np.atleast_1d(np.asarray(trials, dtype=np.int64))
    x = activate(net.layers[0], input_preactivation(net, inputs))
    y = _layer_noise(x, spec, rng, 0, trials, timestep)
    for n in range(1, net.depth):
        x = activate(net.layers[n], preactivation(net, n, y))
        y = _layer_noise(x, spec, rng, n, trials, timestep)
    out = read_out(net, y)
    return np.broadcast_to(out, (trials.size, out.shape[-1])).copy()


def trial_blocks(k: int, block_size: int = TRIAL_BLOCK) -> List[np.ndarray]:
    """Trial indices 0..k-1 grouped by RNG block."""
    return [np.arange(start, min(start + block_size, k)) for start in range(0, k, block_size)]


def run_trials(net: NetworkTopology, inputs: np.ndarray, spec: NoiseSpec, k: int, seed: int,
               n_jobs: int = 1, timestep: int = 0) -> np.ndarray:
    """
    K independent noisy presentations of one input.

    Args:
        net: network (validated here)
        inputs: input vector of length input_dim
        spec: noise intensities and noisy-layer mask
        k: number of trials, at least 2
        seed: RNG seed
        n_jobs: joblib workers (threads); the result does not depend on it
        timestep: timestep coordinate, used by sweeps to separate inputs

    Returns:
        Array of shape (K, output_dim); row t is trial t.
    """
    if k < 2:
        raise SimulationError(f"at least 2 trials are required, got {k}")
    ensure_valid(net)
    u = np.asarray(inputs, dtype=np.float64)
    if u.ndim != 1:
        raise SimulationError(f"expected one input vector, got shape {u.shape}")

    rng = RngStream(seed)
    blocks = trial_blocks(k, rng.block_size)
    if n_jobs == 1 or len(blocks) == 1:
        outputs = [noisy_forward(net, u, spec, rng, trials, timestep) for trials in blocks]
    else:
        outputs = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(noisy_forward)(net, u, spec, rng, trials, timestep) for trials in blocks)
    logger.debug(f"run_trials: k={k} blocks={len(blocks)} timestep={timestep}")
    return np.concatenate(outputs, axis=0)
