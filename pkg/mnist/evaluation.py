"""
Noisy Evaluation

Classification accuracy and output SNR of a trained model when its
layers are noisy, optionally after a mitigation plan.

Accuracy evaluation batches over images: trial = image index and
timestep = presentation index. Output SNR presents one digit K times:
trial = presentation and timestep = dataset index.
"""

import logging
from typing import List, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.metrics import accuracy_score

from core.exceptions import SimulationError, TopologyError
from core.topology import NetworkTopology, forward_batch
from mitigation.plan import MitigationPlan, apply_plan
from mnist.idx_loader import Dataset
from mnist.trainer import TrainedModel
from noise.noise_model import NoiseSpec
from noise.rng import TRIAL_BLOCK, RngStream
from sim.engine import DEFAULT_TRIALS, noisy_forward, run_trials
from sim.snr import estimate_snr

logger = logging.getLogger(__name__)

DEFAULT_NOISY_LAYERS = (1, 2)
DEFAULT_MITIGATED_LAYERS = (1, 2)
DEFAULT_SNR_DIGITS = 500

AGGREGATE_SINGLE = 'single'
AGGREGATE_MEAN = 'mean'

SNR_COLUMNS = ['dataset_index', 'label', 'output_neuron', 'noise_free_value',
               'emp_mean', 'emp_var', 'snr', 'k']


def _check_dims(net: NetworkTopology, data: Dataset) -> None:
    if data.n_features != net.input_dim:
        raise TopologyError(f"model expects {net.input_dim} inputs, dataset has {data.n_features}")


def _noisy_outputs(net: NetworkTopology, data: Dataset, spec: NoiseSpec, rng: RngStream,
                   presentation: int, n_jobs: int) -> np.ndarray:
    """Outputs of one noisy presentation of every image, shape (N, 10)."""
    chunks = [np.arange(start, min(start + TRIAL_BLOCK, len(data)))
              for start in range(0, len(data), TRIAL_BLOCK)]
    if n_jobs == 1:
        outputs = [noisy_forward(net, data.images[idx], spec, rng, idx, presentation) for idx in chunks]
    else:
        outputs = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(noisy_forward)(net, data.images[idx], spec, rng, idx, presentation)
            for idx in chunks)
    return np.concatenate(outputs, axis=0)


def evaluate_accuracy(model: TrainedModel, data: Dataset, spec: NoiseSpec,
                      plan: Optional[MitigationPlan] = None, presentations: int = 1, seed: int = 0,
                      aggregate: str = AGGREGATE_SINGLE, n_jobs: int = 1) -> float:
    """
    Accuracy of the argmax classification under noise.

    Args:
        model: trained classifier
        data: evaluation dataset (normally the test split)
        spec: noise intensities and noisy-layer mask
        plan: optional mitigation plan
        presentations: noisy presentations per image
        seed: RNG seed
        aggregate: 'single' scores every presentation separately and
            averages; 'mean' averages the outputs over presentations first
        n_jobs: joblib workers

    Returns:
        Accuracy in [0, 1].
    """
    if presentations < 1:
        raise SimulationError(f"presentations must be positive, got {presentations}")
    if aggregate not in (AGGREGATE_SINGLE, AGGREGATE_MEAN):
        raise SimulationError(f"unknown aggregate {aggregate!r}")
    _check_dims(model.network, data)
    net = apply_plan(model.network, plan, spec)
    rng = RngStream(seed)

    if spec.is_noiseless:
        predictions = [np.argmax(forward_batch(net, data.images), axis=1)] * presentations
        outputs: List[np.ndarray] = []
    else:
        outputs = [_noisy_outputs(net, data, spec, rng, p, n_jobs) for p in range(presentations)]
        predictions = [np.argmax(out, axis=1) for out in outputs]

    if aggregate == AGGREGATE_MEAN and outputs:
        accuracy = accuracy_score(data.labels, np.argmax(np.mean(outputs, axis=0), axis=1))
    else:
        accuracy = accuracy_score(np.tile(data.labels, presentations), np.concatenate(predictions))
    logger.info(f"Accuracy {accuracy:.4f} over {len(data)} images x {presentations} presentations "
                f"(noise {spec.to_dict()}, plan {plan.to_dict() if plan else {}})")
    return float(accuracy)


def output_snr_over_digits(model: TrainedModel, data: Dataset, spec: NoiseSpec,
                           plan: Optional[MitigationPlan] = None, count: int = DEFAULT_SNR_DIGITS,
                           k: int = DEFAULT_TRIALS, seed: int = 0, n_jobs: int = 1) -> pd.DataFrame:
    """
    SNR of the winning output neuron for randomly drawn digits.

    Each of ``count`` digits (drawn without replacement with ``seed``) is
    presented K times; the winning neuron is the argmax of the noise-free
    output.

    Returns:
        DataFrame with SNR_COLUMNS ordered by noise-free output value.
    """
    if not 1 <= count <= len(data):
        raise SimulationError(f"count must be in [1, {len(data)}], got {count}")
    _check_dims(model.network, data)
    net = apply_plan(model.network, plan, spec)
    indices = np.random.default_rng(seed).choice(len(data), size=count, replace=False)
    digits = data.subset(indices)
    noise_free = forward_batch(model.network, digits.images)

    rows = []
    for row, index in enumerate(indices):
        winner = int(np.argmax(noise_free[row]))
        samples = run_trials(net, digits.images[row], spec, k, seed, n_jobs=n_jobs, timestep=int(index))
        report = estimate_snr(samples[:, winner])
        rows.append((int(index), int(digits.labels[row]), winner, noise_free[row, winner],
                     report.mean[0], report.var[0], report.snr[0], k))

    table = pd.DataFrame(rows, columns=SNR_COLUMNS)
    table = table.sort_values(['noise_free_value', 'dataset_index'], kind='mergesort')
    logger.info(f"Output SNR over {count} digits: max {table['snr'].max():.3f}")
    return table.reset_index(drop=True)
