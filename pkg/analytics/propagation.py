"""
Variance Propagation

Closed-form moments of a noisy network's pre-activations and outputs.

propagate_variance_exact is the row-wise expansion for one connection
matrix, assuming the source neurons' outputs are uncorrelated apart from
the current layer's correlated noise. propagate_variance_approx replaces
the row sums by the matrix statistics mu^2 and eta and reports the
correlated and uncorrelated contributions separately.

propagate_network_moments chains layers using first-order (delta method)
moments through the activations, E[f(a)] ~ f(E[a]) and
Var[f(a)] ~ f'(E[a])^2 Var[a]. Its default covariance mode keeps the
cross-neuron covariance created by correlated noise, which is what makes
ghost subtraction visible analytically; the diagonal mode applies the
row-wise formula layer by layer.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from analytics.matrix_stats import MatrixStats
from core.exceptions import AnalyticsError, TopologyError
from core.topology import NetworkTopology, activate, ensure_valid, input_preactivation
from noise.noise_model import NoiseSpec, layer_noise_covariance, layer_noise_variance

logger = logging.getLogger(__name__)

SNR_UNBOUNDED = np.inf

COVARIANCE = 'covariance'
DIAGONAL = 'diagonal'


@dataclass(frozen=True)
class MomentState:
    """Per-neuron mean and variance of a layer's values."""
    mean: np.ndarray
    var: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=np.float64))
        var = np.atleast_1d(np.asarray(self.var, dtype=np.float64))
        if var.shape != mean.shape:
            raise AnalyticsError(f"mean has shape {mean.shape} but var has {var.shape}")
        if np.any(var < 0.0):
            raise AnalyticsError("variance must be non-negative")
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'var', var)

    @classmethod
    def deterministic(cls, mean: np.ndarray) -> 'MomentState':
        mean = np.atleast_1d(np.asarray(mean, dtype=np.float64))
        return cls(mean, np.zeros_like(mean))


@dataclass(frozen=True)
class ApproxVariance:
    """
    Statistics-based variance estimate of a target neuron.

    correlated: I^2 mu^2(W) (2 D_A^C + 2 D_M^C mu^2(E[x]))
    uncorrelated: I eta(W) (2 D_A^U + 2 D_M^U (1 + 2 D_M^C) eta(E[x]))
    passthrough: (1 + 2 D_M^C)(1 + 2 D_M^U) I eta(W) mean(Var[x])
    """
    correlated: float
    uncorrelated: float
    passthrough: float

    @property
    def total(self) -> float:
        return self.correlated + self.uncorrelated + self.passthrough


@dataclass
class NetworkMoments:
    """Output moments of a network plus the noisy-output moments y_n of every layer."""
    mean: np.ndarray
    var: np.ndarray
    cov: Optional[np.ndarray] = None
    layers: List[MomentState] = field(default_factory=list)

    @property
    def snr(self) -> np.ndarray:
        return predict_snr(self.mean, self.var)


def propagate_variance_exact(w: np.ndarray, state: MomentState, spec: NoiseSpec) -> MomentState:
    """
    Mean and variance of a_{n+1} = W y_n.

    Args:
        w: connection matrix (I_{n+1} x I_n)
        state: E[x_n] and Var[x_n] of the noise-free source outputs
        spec: noise intensities of the source layer

    Returns:
        MomentState of the target pre-activations.
    """
    w = np.atleast_2d(np.asarray(w, dtype=np.float64))
    if w.shape[1] != state.mean.size:
        raise TopologyError(f"matrix has {w.shape[1]} columns but the state has {state.mean.size} neurons")
    w2 = w ** 2
    mean_a = w @ state.mean
    var_a = (
        2.0 * spec.da_c * w.sum(axis=1) ** 2
        + 2.0 * spec.da_u * w2.sum(axis=1)
        + 2.0 * spec.dm_c * mean_a ** 2
        + 2.0 * spec.dm_u * (1.0 + 2.0 * spec.dm_c) * (w2 @ state.mean ** 2)
        + (1.0 + 2.0 * spec.dm_c) * (1.0 + 2.0 * spec.dm_u) * (w2 @ state.var)
    )
    return MomentState(mean_a, var_a)


def propagate_variance_approx(stats: MatrixStats, state: MomentState, spec: NoiseSpec) -> ApproxVariance:
    """
    Statistics form of the row-wise expansion.

    mu^2 and eta of E[x] are the squared mean and the mean of square over
    the vector's entries. The pass-through term keeps the factor I_n of
    the row sum it replaces. For a constant matrix the result equals every
    row of propagate_variance_exact.
    """
    if state.mean.size != stats.source_dim:
        raise TopologyError(f"statistics are for {stats.source_dim} source neurons, "
                            f"state has {state.mean.size}")
    mu2_x = float(np.mean(state.mean) ** 2)
    eta_x = float(np.mean(state.mean ** 2))
    correlated = stats.corr_gain * (2.0 * spec.da_c + 2.0 * spec.dm_c * mu2_x)
    uncorrelated = stats.uncorr_gain * (2.0 * spec.da_u + 2.0 * spec.dm_u * (1.0 + 2.0 * spec.dm_c) * eta_x)
    passthrough = ((1.0 + 2.0 * spec.dm_c) * (1.0 + 2.0 * spec.dm_u)
                   * stats.uncorr_gain * float(np.mean(state.var)))
    return ApproxVariance(correlated, uncorrelated, passthrough)


def propagate_covariance(w: np.ndarray, mean_x: np.ndarray, cov_x: np.ndarray,
                         spec: NoiseSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Mean and full covariance of a_{n+1} = W y_n for a noisy source layer.

    Returns:
        (E[a], Cov[a]) with Cov[a] = W Cov[y] W^T.
    """
    w = np.atleast_2d(np.asarray(w, dtype=np.float64))
    mean_x = np.asarray(mean_x, dtype=np.float64)
    if w.shape[1] != mean_x.size:
        raise TopologyError(f"matrix has {w.shape[1]} columns but the layer has {mean_x.size} neurons")
    cov_y = layer_noise_covariance(mean_x, cov_x, spec)
    return w @ mean_x, w @ cov_y @ w.T


def _layer_spec(spec: NoiseSpec, n: int) -> NoiseSpec:
    return spec if spec.enabled(n) else NoiseSpec()


def propagate_network_moments(net: NetworkTopology, inputs: np.ndarray, spec: NoiseSpec,
                              method: str = COVARIANCE) -> NetworkMoments:
    """
    Delta-method moments of the network output for one input vector.

    Args:
        net: validated network
        inputs: input vector of length input_dim
        spec: noise intensities and noisy-layer mask
        method: 'covariance' (tracks cross-neuron covariance) or 'diagonal'

    Returns:
        NetworkMoments of the readout R y_L.
    """
    if method not in (COVARIANCE, DIAGONAL):
        raise AnalyticsError(f"unknown propagation method {method!r}")
    ensure_valid(net)
    u = np.asarray(inputs, dtype=np.float64)
    if u.ndim != 1:
        raise TopologyError(f"expected an input vector, got shape {u.shape}")

    mean_x = activate(net.layers[0], input_preactivation(net, u)[0])
    cov_x = np.zeros((mean_x.size, mean_x.size))
    var_x = np.zeros(mean_x.size)
    layers: List[MomentState] = []

    for n in range(net.depth):
        noise = _layer_spec(spec, n)
        if method == COVARIANCE:
            cov_y = layer_noise_covariance(mean_x, cov_x, noise)
            layers.append(MomentState(mean_x, np.maximum(np.diag(cov_y), 0.0)))
        else:
            layers.append(MomentState(mean_x, np.maximum(layer_noise_variance(mean_x, var_x, noise), 0.0)))
        if n == net.depth - 1:
            break

        target = net.layers[n + 1]
        w = net.weights[n]
        if method == COVARIANCE:
            mean_a, cov_a = w @ mean_x, w @ cov_y @ w.T
        else:
            moments = propagate_variance_exact(w, MomentState(mean_x, var_x), noise)
            mean_a, var_a = moments.mean, moments.var
        if target.bias is not None:
            mean_a = mean_a + target.bias

        slope = target.activation.derivative(mean_a)
        slope[target.ghost_mask] = 0.0
        mean_x = activate(target, mean_a)
        if method == COVARIANCE:
            cov_x = slope[:, None] * cov_a * slope[None, :]
        else:
            var_x = slope ** 2 * var_a

    readout = net.effective_readout()
    mean_out = readout @ mean_x
    if method == COVARIANCE:
        cov_out = readout @ cov_y @ readout.T
        return NetworkMoments(mean_out, np.maximum(np.diag(cov_out), 0.0), cov_out, layers)
    return NetworkMoments(mean_out, (readout ** 2) @ layers[-1].var, None, layers)


def predict_snr(mean: Union[float, np.ndarray], var: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    SNR = mean / sqrt(var), elementwise.

    Zero variance maps to SNR_UNBOUNDED.
    """
    mean_arr = np.asarray(mean, dtype=np.float64)
    var_arr = np.asarray(var, dtype=np.float64)
    if np.any(var_arr < 0.0):
        raise AnalyticsError("variance must be non-negative")
    mean_arr, var_arr = np.broadcast_arrays(mean_arr, var_arr)
    snr = np.full(mean_arr.shape, SNR_UNBOUNDED)
    positive = var_arr > 0.0
    snr[positive] = mean_arr[positive] / np.sqrt(var_arr[positive])
    if snr.ndim == 0:
        return float(snr)
    return snr
