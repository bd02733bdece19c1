"""
Ghost Neurons

A ghost neuron receives no input, so its noisy output carries only the
layer's additive noise, including the correlated draw it shares with every
other neuron of the layer. Feeding it forward with weight W_g cancels
correlated additive noise in the targets:

    Var[a_i] = 2 D_A^U (sum_j W_ij^2 + W_g^2) + 2 D_A^C (sum_j W_ij + W_g)^2

W_g = -sum_j W_ij removes the correlated term entirely (adaptive weights),
which is what direct subtraction y_i - y_g amounts to once the result is
propagated through the outgoing matrix. The noise-free output of a ghost is
exactly 0, so none of these constructions changes the noise-free network
function. Multiplicative noise on a zero output is zero, so ghosts address
additive noise only.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from analytics.matrix_stats import MatrixStats
from core.exceptions import MitigationError
from core.topology import LayerSpec, NetworkTopology
from noise.noise_model import NoiseSpec, apply_layer_noise
from noise.rng import RngStream

logger = logging.getLogger(__name__)


class GhostMode(Enum):
    """How the ghost's output is weighted into the next layer."""
    DIRECT = "direct"
    WEIGHTED = "weighted"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class DirectGhostLayer:
    """
    Single layer of ``width`` neurons plus one ghost whose output is
    subtracted from every neuron: z_i = y_i - y_g.
    """
    width: int
    spec: NoiseSpec

    def predicted_variance(self, x: Union[float, np.ndarray] = 0.0) -> np.ndarray:
        """
        Var[z_i] for noise-free outputs x.

        4 D_A^U from the two uncorrelated additive draws plus the
        multiplicative noise of y_i, which the ghost cannot cancel.
        """
        x = np.broadcast_to(np.asarray(x, dtype=np.float64), (self.width,))
        gain = (1.0 + 2.0 * self.spec.dm_u) * (1.0 + 2.0 * self.spec.dm_c) - 1.0
        return 4.0 * self.spec.da_u + gain * x ** 2

    def sample(self, x: np.ndarray, rng: RngStream, trials: Union[int, np.ndarray],
               layer: int = 0, timestep: int = 0) -> np.ndarray:
        """Ghost-subtracted outputs, shape (T, width)."""
        x = np.broadcast_to(np.asarray(x, dtype=np.float64), (self.width,))
        y = apply_layer_noise(np.append(x, 0.0), self.spec, rng, layer, trials, timestep)
        return y[:, :-1] - y[:, -1:]


def attach_ghost_direct(width: int, spec: NoiseSpec) -> DirectGhostLayer:
    """Build the single-layer direct-subtraction construction."""
    if width < 1:
        raise MitigationError(f"layer width must be positive, got {width}")
    if spec.da_u == 0.0 and spec.da_c == 0.0:
        logger.warning("Ghost attached to a layer without additive noise has no effect")
    return DirectGhostLayer(int(width), spec)


def ghost_variance(w_row: np.ndarray, wg: float, spec: NoiseSpec) -> float:
    """Additive-noise variance of a target fed by ``w_row`` and a ghost weighted ``wg``."""
    w_row = np.asarray(w_row, dtype=np.float64).reshape(-1)
    return float(2.0 * spec.da_u * (np.sum(w_row ** 2) + wg ** 2)
                 + 2.0 * spec.da_c * (np.sum(w_row) + wg) ** 2)


def ghost_variance_approx(stats: MatrixStats, wg: float, spec: NoiseSpec) -> float:
    """
    Statistics form of ghost_variance: sum W^2 -> I eta, sum W -> I mu.

    The matrix mean is taken as non-negative (mu = sqrt(mu^2)).
    """
    i = stats.source_dim
    return float(2.0 * spec.da_u * (i * stats.eta + wg ** 2)
                 + 2.0 * spec.da_c * (i * np.sqrt(stats.mu2) + wg) ** 2)


def optimal_ghost_weight(w_row: np.ndarray, spec: NoiseSpec) -> float:
    """W_g minimising ghost_variance: -D_A^C sum W / (D_A^U + D_A^C)."""
    additive = spec.da_u + spec.da_c
    if additive == 0.0:
        raise MitigationError("optimal ghost weight is undefined without additive noise")
    return float(-spec.da_c * np.sum(w_row) / additive)


def adaptive_ghost_weights(w: np.ndarray) -> np.ndarray:
    """Per-target ghost weights, the negated row sums of the outgoing matrix."""
    w = np.atleast_2d(np.asarray(w, dtype=np.float64))
    if w.size == 0:
        raise MitigationError("cannot derive ghost weights from an empty matrix")
    return -w.sum(axis=1)


def _outgoing(net: NetworkTopology, layer: int) -> np.ndarray:
    """Matrix fed by ``layer``: W^layer, or the readout for the last layer."""
    if layer == net.depth - 1:
        return net.effective_readout()
    return net.weights[layer]


def _append_ghost(net: NetworkTopology, layer: int, column: np.ndarray) -> NetworkTopology:
    """Append one ghost neuron to ``layer`` whose outgoing weights are ``column``."""
    spec = net.layers[layer]
    if spec.ghosts:
        raise MitigationError(f"layer {layer} already has a ghost neuron")

    bias = None if spec.bias is None else np.append(spec.bias, 0.0)
    layers = list(net.layers)
    layers[layer] = LayerSpec(spec.width + 1, spec.activation, bias, spec.ghosts + 1)
    weights = list(net.weights)
    changes = {}

    if layer == 0:
        changes['input_map'] = np.append(net.effective_input_map(), -1)
    else:
        incoming = weights[layer - 1]
        weights[layer - 1] = np.vstack([incoming, np.zeros((1, incoming.shape[1]))])

    if layer == net.depth - 1:
        changes['readout'] = np.column_stack([net.effective_readout(), column])
    else:
        column = np.where(net.layers[layer + 1].ghost_mask, 0.0, column)
        weights[layer] = np.column_stack([weights[layer], column])

    return net.replace(layers=tuple(layers), weights=tuple(weights), **changes)


def _check_layer(net: NetworkTopology, layer: int) -> None:
    if not 0 <= layer < net.depth:
        raise MitigationError(f"layer {layer} out of range for a {net.depth}-layer network")


def attach_ghost_weighted(net: NetworkTopology, layer: int, wg: float) -> NetworkTopology:
    """Add a ghost to ``layer`` feeding every target neuron with the same weight ``wg``."""
    _check_layer(net, layer)
    if not np.isfinite(wg):
        raise MitigationError(f"ghost weight must be finite, got {wg}")
    column = np.full(_outgoing(net, layer).shape[0], float(wg))
    return _append_ghost(net, layer, column)


def attach_ghost_adaptive(net: NetworkTopology, layer: int) -> NetworkTopology:
    """Add a ghost to ``layer`` with per-target weights -sum_j W_ij."""
    _check_layer(net, layer)
    return _append_ghost(net, layer, adaptive_ghost_weights(_outgoing(net, layer)))


def attach_ghost(net: NetworkTopology, layer: int, mode: GhostMode, wg: Optional[float] = None,
                 spec: Optional[NoiseSpec] = None) -> NetworkTopology:
    """
    Attach a ghost neuron to one layer of a network.

    Args:
        net: network to transform (left unchanged)
        layer: index of the layer receiving the ghost
        mode: DIRECT and ADAPTIVE build the adaptive weights; WEIGHTED uses ``wg``
        wg: fixed ghost weight for WEIGHTED mode
        spec: optional noise spec, only used to warn about noiseless layers

    Returns:
        New NetworkTopology with the ghost appended.
    """
    if spec is not None and not spec.enabled(layer):
        logger.warning(f"Ghost attached to layer {layer}, which the noise mask disables")
    if mode is GhostMode.WEIGHTED:
        if wg is None:
            raise MitigationError("weighted ghost mode requires a ghost weight")
        return attach_ghost_weighted(net, layer, wg)
    return attach_ghost_adaptive(net, layer)
