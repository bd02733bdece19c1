"""
Stochastic noise model and the reproducible random-number contract.
"""

from .noise_model import (
    NoiseSpec,
    apply_layer_noise,
    layer_noise_covariance,
    layer_noise_variance,
    sample_noisy_output,
)
from .rng import TRIAL_BLOCK, NoiseTag, RngStream

__all__ = [
    'NoiseSpec',
    'NoiseTag',
    'RngStream',
    'TRIAL_BLOCK',
    'apply_layer_noise',
    'layer_noise_covariance',
    'layer_noise_variance',
    'sample_noisy_output',
]
