"""
Experiment runners, one per command-line subcommand.
"""

from .base_experiment import BaseExperiment, ExperimentOutputError
from .mnist_experiments import MnistEvalExperiment, MnistSnrExperiment, MnistTrainExperiment
from .network_experiments import SnrSweepExperiment, StatsExperiment

EXPERIMENTS = {
    'stats': StatsExperiment,
    'snr-sweep': SnrSweepExperiment,
    'mnist-train': MnistTrainExperiment,
    'mnist-eval': MnistEvalExperiment,
    'mnist-snr': MnistSnrExperiment,
}

NETWORK_SUBCOMMANDS = ('stats', 'snr-sweep')

__all__ = [
    'EXPERIMENTS',
    'NETWORK_SUBCOMMANDS',
    'BaseExperiment',
    'ExperimentOutputError',
    'MnistEvalExperiment',
    'MnistSnrExperiment',
    'MnistTrainExperiment',
    'SnrSweepExperiment',
    'StatsExperiment',
]
