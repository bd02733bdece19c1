"""
Connection Matrix Statistics

Summary statistics of a weight matrix W^n that govern how noise scales
from layer to layer:

    squared mean   mu^2(W) = ((1 / (I_n I_{n+1})) sum_ij W_ij)^2
    mean of square eta(W)  = (1 / (I_n I_{n+1})) sum_ij W_ij^2

Correlated noise in the current layer scales with I_n^2 mu^2 and
uncorrelated noise with I_n eta. When I_n mu^2 > eta the correlated
contribution dominates, so uncorrelated noise is effectively suppressed.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
import pandas as pd

from core.exceptions import AnalyticsError
from core.topology import NetworkTopology, ensure_valid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatrixStats:
    """mu^2 and eta of one connection matrix with its dimensions."""
    mu2: float
    eta: float
    source_dim: int
    target_dim: int

    @property
    def corr_gain(self) -> float:
        """I_n^2 mu^2: scaling of correlated noise from the source layer."""
        return self.source_dim ** 2 * self.mu2

    @property
    def uncorr_gain(self) -> float:
        """I_n eta: scaling of uncorrelated noise from the source layer."""
        return self.source_dim * self.eta

    @property
    def scaled_mu2(self) -> float:
        return self.source_dim * self.mu2

    def to_dict(self) -> Dict[str, Any]:
        return {
            'source_dim': self.source_dim,
            'target_dim': self.target_dim,
            'mu2': self.mu2,
            'eta': self.eta,
            'i_mu2': self.scaled_mu2,
            'i2_mu2': self.corr_gain,
            'i_eta': self.uncorr_gain,
            'uncorrelated_suppressed': uncorrelated_suppressed(self),
        }


def _checked(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.size == 0:
        raise AnalyticsError("empty matrix")
    return w


def squared_mean(w: np.ndarray) -> float:
    """mu^2(W): square of the mean over all entries."""
    return float(np.mean(_checked(w)) ** 2)


def mean_of_square(w: np.ndarray) -> float:
    """eta(W): mean of the squared entries."""
    return float(np.mean(_checked(w) ** 2))


def matrix_stats(w: np.ndarray) -> MatrixStats:
    """
    Statistics of a target-row x source-column matrix.

    A 1-D array is read as a single target row.
    """
    w = np.atleast_2d(_checked(w))
    target_dim, source_dim = w.shape
    return MatrixStats(mu2=squared_mean(w), eta=mean_of_square(w),
                       source_dim=source_dim, target_dim=target_dim)


def uncorrelated_suppressed(stats: MatrixStats) -> bool:
    """Dominance verdict I_n mu^2 > eta."""
    return stats.scaled_mu2 > stats.eta


def connection_block(net: NetworkTopology, n: int) -> np.ndarray:
    """W^n restricted to real (non-ghost) source and target neurons."""
    source, target = net.layers[n], net.layers[n + 1]
    return net.weights[n][:target.real_width, :source.real_width]


def network_stats(net: NetworkTopology) -> pd.DataFrame:
    """
    Per-layer statistics table.

    Ghost rows and columns are excluded so that the table describes the
    network's own connections.

    Returns:
        DataFrame with one row per weight matrix: layer, source_dim,
        target_dim, mu2, eta, i_mu2, i2_mu2, i_eta, uncorrelated_suppressed.
    """
    ensure_valid(net)
    rows = []
    for n in range(net.depth - 1):
        stats = matrix_stats(connection_block(net, n))
        rows.append({'layer': n, **stats.to_dict()})
        logger.debug(f"layer {n}: I*mu2={stats.scaled_mu2:.4g} eta={stats.eta:.4g}")
    return pd.DataFrame(rows, columns=['layer', 'source_dim', 'target_dim', 'mu2', 'eta',
                                       'i_mu2', 'i2_mu2', 'i_eta', 'uncorrelated_suppressed'])
