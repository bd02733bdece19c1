"""
Network Generators

Small synthetic networks for SNR sweeps and equivalence tests:

- uniform_fan_network: 1 -> I -> 1, the input fans out with weight 1 and
  the output neuron averages the hidden layer (weights 1/I).
- matched_stats_network: same shape, but the readout row has exactly the
  requested I mu^2 and eta.
- random_network: random widths, weights, biases and sigmoid gains.

Each is selectable by name from a generator table (see
network_from_generator_spec).
"""

import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np

from core.activations import Activation
from core.exceptions import TopologyError
from core.topology import LayerSpec, NetworkTopology

logger = logging.getLogger(__name__)

STEEP_SIGMOID = Activation.sigmoid(gain=7.0, offset=0.5)


def _single_hidden(row: np.ndarray, hidden: Activation, output: Activation) -> NetworkTopology:
    width = row.size
    layers = (LayerSpec(1), LayerSpec(width, hidden), LayerSpec(1, output))
    return NetworkTopology(layers, (np.ones((width, 1)), row.reshape(1, width)))


def uniform_fan_network(width: int = 100, hidden: Optional[Activation] = None,
                        output: Optional[Activation] = None) -> NetworkTopology:
    """1 -> width -> 1 network with uniform readout weights 1/width."""
    if width < 1:
        raise TopologyError(f"width must be positive, got {width}")
    return _single_hidden(np.full(width, 1.0 / width), hidden or Activation.linear(),
                          output or Activation.linear())


def matched_stats_row(i_mu2: float, eta: float, width: int, seed: int = 0) -> np.ndarray:
    """
    Connection row with I mu^2(W) = i_mu2 and eta(W) = eta exactly.

    W = mu + sigma z with z standardised to zero mean and unit mean square,
    mu = sqrt(i_mu2 / I) and sigma^2 = eta - mu^2.
    """
    if width < 2:
        raise TopologyError("a matched-statistics row needs at least 2 entries")
    mu2 = i_mu2 / width
    if i_mu2 < 0.0 or eta < mu2:
        raise TopologyError(f"no real matrix has I*mu2={i_mu2} and eta={eta} at I={width}")
    z = np.random.default_rng(seed).standard_normal(width)
    z = (z - z.mean()) / z.std()
    return np.sqrt(mu2) + np.sqrt(eta - mu2) * z


def matched_stats_network(i_mu2: float, eta: float, width: int = 100, seed: int = 0,
                          hidden: Optional[Activation] = None,
                          output: Optional[Activation] = None) -> NetworkTopology:
    """1 -> width -> 1 network whose readout row has the given statistics."""
    row = matched_stats_row(i_mu2, eta, width, seed)
    return _single_hidden(row, hidden or STEEP_SIGMOID, output or Activation.linear())


def random_network(seed: int, widths: Optional[Sequence[int]] = None, max_gain: float = 3.0,
                   max_width: int = 12, max_depth: int = 4) -> NetworkTopology:
    """
    Random network with sigmoid hidden layers.

    Weights are N(0, 1/fan_in), biases N(0, 0.1^2), gains uniform on
    [1, max_gain] and offsets uniform on [-0.5, 0.5]. The input layer is
    linear; the output layer is linear or sigmoid with equal odds.
    """
    rng = np.random.default_rng(seed)
    if widths is None:
        depth = int(rng.integers(2, max_depth + 1))
        widths = [int(w) for w in rng.integers(1, max_width + 1, size=depth)]
    widths = list(widths)
    if len(widths) < 2:
        raise TopologyError("a network needs at least 2 layers")

    def sigmoid() -> Activation:
        return Activation.sigmoid(rng.uniform(1.0, max_gain), rng.uniform(-0.5, 0.5))

    layers = [LayerSpec(widths[0])]
    for width in widths[1:-1]:
        layers.append(LayerSpec(width, sigmoid(), rng.normal(0.0, 0.1, width)))
    output = sigmoid() if rng.random() < 0.5 else Activation.linear()
    layers.append(LayerSpec(widths[-1], output, rng.normal(0.0, 0.1, widths[-1])))

    weights = [rng.normal(0.0, 1.0 / np.sqrt(source), (target, source))
               for source, target in zip(widths[:-1], widths[1:])]
    return NetworkTopology(tuple(layers), tuple(weights))


def network_from_generator_spec(spec: Dict[str, Any]) -> NetworkTopology:
    """
    Build a network from a generator table.

    Recognised kinds: ``uniform-fan`` (width, hidden), ``matched-stats``
    (i_mu2, eta, width, seed, hidden) and ``random`` (seed, widths, max_gain).
    ``hidden`` is an activation table as in network description files.
    """
    kind = spec.get('kind')
    hidden = Activation.from_dict(spec['hidden']) if 'hidden' in spec else None
    if kind == 'uniform-fan':
        return uniform_fan_network(int(spec.get('width', 100)), hidden)
    if kind == 'matched-stats':
        try:
            i_mu2, eta = float(spec['i_mu2']), float(spec['eta'])
        except KeyError as exc:
            raise TopologyError(f"matched-stats generator needs {exc}") from exc
        return matched_stats_network(i_mu2, eta, int(spec.get('width', 100)),
                                     int(spec.get('seed', 0)), hidden)
    if kind == 'random':
        return random_network(int(spec.get('seed', 0)), spec.get('widths'),
                              float(spec.get('max_gain', 3.0)))
    raise TopologyError(f"unknown network generator {kind!r}")
