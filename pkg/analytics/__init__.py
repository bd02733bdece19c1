"""
Analytics Package

Closed-form connection-matrix statistics, variance propagation through
noisy layers and analytic SNR prediction.
"""

from .matrix_stats import (
    MatrixStats,
    connection_block,
    matrix_stats,
    mean_of_square,
    network_stats,
    squared_mean,
    uncorrelated_suppressed,
)
from .propagation import (
    SNR_UNBOUNDED,
    ApproxVariance,
    MomentState,
    NetworkMoments,
    predict_snr,
    propagate_covariance,
    propagate_network_moments,
    propagate_variance_approx,
    propagate_variance_exact,
)

__all__ = [
    'SNR_UNBOUNDED',
    'ApproxVariance',
    'MatrixStats',
    'MomentState',
    'NetworkMoments',
    'connection_block',
    'matrix_stats',
    'mean_of_square',
    'network_stats',
    'predict_snr',
    'propagate_covariance',
    'propagate_network_moments',
    'propagate_variance_approx',
    'propagate_variance_exact',
    'squared_mean',
    'uncorrelated_suppressed',
]
