"""
Average Pooling

Each selected neuron is replaced by m replicas that share its incoming
weights; every outgoing weight is divided by m and applied to all
replicas, so the next layer sees the pool average. Uncorrelated noise
variance drops by 1/m and the SNR improves by sqrt(m); correlated noise is
shared by the replicas and is not reduced.

Replicas of neuron j occupy indices j*m .. j*m + m - 1.
"""

import logging
from typing import Iterable, Optional

import numpy as np

from core.exceptions import MitigationError
from core.topology import LayerSpec, NetworkTopology

logger = logging.getLogger(__name__)


def _pool_layer(net: NetworkTopology, layer: int, m: int) -> NetworkTopology:
    spec = net.layers[layer]
    if spec.ghosts:
        raise MitigationError(
            f"layer {layer} already has ghost neurons; pooling must be applied before ghosts")

    bias = None if spec.bias is None else np.repeat(spec.bias, m)
    layers = list(net.layers)
    layers[layer] = LayerSpec(spec.width * m, spec.activation, bias, 0)
    weights = list(net.weights)
    changes = {}

    if layer == 0:
        changes['input_map'] = np.repeat(net.effective_input_map(), m)
    else:
        weights[layer - 1] = np.repeat(weights[layer - 1], m, axis=0)

    if layer == net.depth - 1:
        changes['readout'] = np.repeat(net.effective_readout(), m, axis=1) / m
    else:
        weights[layer] = np.repeat(weights[layer], m, axis=1) / m

    return net.replace(layers=tuple(layers), weights=tuple(weights), **changes)


def build_pooled_network(net: NetworkTopology, m: int,
                         layers: Optional[Iterable[int]] = None) -> NetworkTopology:
    """
    Replace every neuron of the selected layers by a pool of m replicas.

    Args:
        net: network to transform (left unchanged)
        m: pool size; 1 returns the network as is
        layers: layer indices to pool, all layers when None

    Returns:
        Pooled NetworkTopology with the same noise-free function.
    """
    if int(m) != m or m < 1:
        raise MitigationError(f"pool size must be a positive integer, got {m}")
    m = int(m)
    selected = sorted(set(range(net.depth) if layers is None else layers))
    for layer in selected:
        if not 0 <= layer < net.depth:
            raise MitigationError(f"layer {layer} out of range for a {net.depth}-layer network")
    if m == 1:
        return net

    for layer in selected:
        net = _pool_layer(net, layer, m)
    logger.debug(f"Pooled layers {selected} with m={m}: widths {net.widths}")
    return net


def pooled_variance(var_single: float, m: int) -> float:
    """Uncorrelated-noise variance of a pool average, var_single / m."""
    if m < 1:
        raise MitigationError(f"pool size must be positive, got {m}")
    if var_single < 0.0:
        raise MitigationError("variance must be non-negative")
    return float(var_single) / m
