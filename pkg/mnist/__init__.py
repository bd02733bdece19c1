"""
MNIST Package

IDX data loading, from-scratch training of the 784-100-10 sigmoid
classifier and its evaluation under noise.
"""

from .evaluation import (
    AGGREGATE_MEAN,
    AGGREGATE_SINGLE,
    DEFAULT_MITIGATED_LAYERS,
    DEFAULT_NOISY_LAYERS,
    SNR_COLUMNS,
    evaluate_accuracy,
    output_snr_over_digits,
)
from .idx_loader import Dataset, load_idx, load_mnist
from .trainer import TrainConfig, TrainedModel, TrainingMetadata, load_model, save_model, train

__all__ = [
    'AGGREGATE_MEAN',
    'AGGREGATE_SINGLE',
    'DEFAULT_MITIGATED_LAYERS',
    'DEFAULT_NOISY_LAYERS',
    'SNR_COLUMNS',
    'Dataset',
    'TrainConfig',
    'TrainedModel',
    'TrainingMetadata',
    'evaluate_accuracy',
    'load_idx',
    'load_mnist',
    'load_model',
    'output_snr_over_digits',
    'save_model',
    'train',
]
