"""
Network description files.

A network is stored as a JSON document:

    {
      "layers": [{"width": 784, "activation": {"kind": "linear"}},
                 {"width": 100, "activation": {"kind": "sigmoid", "gain": 1.0, "offset": 0.0},
                  "bias": [...], "ghosts": 0}, ...],
      "weights": [<matrix 0>, <matrix 1>, ...],
      "input_map": [...],          # optional
      "readout": [[...], ...],     # optional
      "metadata": {...}            # optional, free-form
    }

Each matrix is either a list of rows (target-major) or a flat row-major
list of I_{n+1} * I_n numbers.
"""

import json
import logging
import os
from typing import Any, Dict, Optional, Tuple

import numpy as np

from core.activations import Activation
from core.exceptions import TopologyError
from core.topology import LayerSpec, NetworkTopology, validate_topology

logger = logging.getLogger(__name__)


def network_to_dict(net: NetworkTopology, metadata: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Serialize a network (and optional metadata block) to plain JSON types."""
    layers = []
    for layer in net.layers:
        entry: Dict[str, Any] = {'width': layer.width, 'activation': layer.activation.to_dict()}
        if layer.bias is not None:
            entry['bias'] = layer.bias.tolist()
        if layer.ghosts:
            entry['ghosts'] = layer.ghosts
        layers.append(entry)

    data: Dict[str, Any] = {
        'layers': layers,
        'weights': [w.tolist() for w in net.weights],
    }
    if net.input_map is not None:
        data['input_map'] = net.input_map.tolist()
    if net.readout is not None:
        data['readout'] = net.readout.tolist()
    if metadata:
        data['metadata'] = metadata
    return data


def network_from_dict(data: Dict[str, Any]) -> NetworkTopology:
    """Build a network from its JSON description; dimension errors raise TopologyError."""
    try:
        layer_entries = data['layers']
        weight_entries = data.get('weights', [])
    except (KeyError, TypeError) as exc:
        raise TopologyError(f"Network description is missing {exc}") from exc

    layers = []
    for entry in layer_entries:
        layers.append(LayerSpec(
            width=entry['width'],
            activation=Activation.from_dict(entry.get('activation', {'kind': 'linear'})),
            bias=entry.get('bias'),
            ghosts=entry.get('ghosts', 0),
        ))

    weights = []
    for n, raw in enumerate(weight_entries):
        matrix = np.asarray(raw, dtype=np.float64)
        if matrix.ndim == 1 and n + 1 < len(layers):
            expected = layers[n + 1].width * layers[n].width
            if matrix.size != expected:
                raise TopologyError(f"layer {n}: flat weight list has {matrix.size} entries, "
                                    f"expected {expected}")
            matrix = matrix.reshape(layers[n + 1].width, layers[n].width)
        weights.append(matrix)

    net = NetworkTopology(
        layers=tuple(layers),
        weights=tuple(weights),
        input_map=data.get('input_map'),
        readout=data.get('readout'),
    )
    violations = validate_topology(net)
    if violations:
        raise TopologyError("Invalid network description: " + "; ".join(violations))
    return net


def save_network(net: NetworkTopology, path: str, metadata: Optional[Dict[str, Any]] = None) -> None:
    """Write a network description file."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(network_to_dict(net, metadata), f)
    logger.info(f"Network saved to {path}")


def load_network(path: str) -> Tuple[NetworkTopology, Dict[str, Any]]:
    """
    Read a network description file.

    Returns:
        The network and its metadata block (empty dict when absent).
    """
    with open(path, 'r') as f:
        data = json.load(f)
    net = network_from_dict(data)
    logger.info(f"Loaded network {net.widths} from {path}")
    return net, data.get('metadata', {})
