"""
Empirical SNR estimation from repeated presentations.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from analytics.propagation import predict_snr
from core.exceptions import SimulationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SnrReport:
    """Per output neuron: empirical mean, unbiased variance, SNR and trial count K."""
    mean: np.ndarray
    var: np.ndarray
    snr: np.ndarray
    k: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mean': self.mean.tolist(),
            'var': self.var.tolist(),
            'snr': self.snr.tolist(),
            'k': self.k,
        }


def estimate_snr(samples: np.ndarray) -> SnrReport:
    """
    SNR of each output neuron from K samples.

    Args:
        samples: shape (K,) or (K, output_dim)

    Returns:
        SnrReport; zero variance gives the unbounded SNR sentinel.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 1:
        samples = samples[:, None]
    k = samples.shape[0]
    if k < 2:
        raise SimulationError(f"at least 2 samples are required, got {k}")
    mean = samples.mean(axis=0)
    var = samples.var(axis=0, ddof=1)
    constant = np.ptp(samples, axis=0) == 0.0
    mean[constant] = samples[0, constant]
    var[constant] = 0.0
    return SnrReport(mean=mean, var=var, snr=np.atleast_1d(predict_snr(mean, var)), k=k)
