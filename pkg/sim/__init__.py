"""
Simulation Package

Monte Carlo trial engine, empirical SNR estimation, SNR sweeps and
synthetic network generators.
"""

from .engine import SimConfig, noisy_forward, run_trials, trial_blocks
from .generators import (
    matched_stats_network,
    matched_stats_row,
    network_from_generator_spec,
    random_network,
    uniform_fan_network,
)
from .snr import SnrReport, estimate_snr
from .sweep import SWEEP_COLUMNS, snr_sweep, sweep_inputs, write_sweep_csv

__all__ = [
    'SWEEP_COLUMNS',
    'SimConfig',
    'SnrReport',
    'estimate_snr',
    'matched_stats_network',
    'matched_stats_row',
    'network_from_generator_spec',
    'noisy_forward',
    'random_network',
    'run_trials',
    'snr_sweep',
    'sweep_inputs',
    'trial_blocks',
    'uniform_fan_network',
    'write_sweep_csv',
]
