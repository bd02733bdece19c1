"""
Network Topology and Noise-Free Forward Pass

Domain types describing a feedforward network: ordered layers with a width,
an activation and an optional bias, plus one weight matrix per adjacent
layer pair. Matrices are oriented target-row x source-column, so
weights[n] has shape (I_{n+1}, I_n) and a_{n+1} = weights[n] @ y_n.

Two optional pieces let mitigation transforms reach the outer layers:
``input_map`` tells the input layer which external input each neuron reads
(-1 for ghost slots), and ``readout`` is a noiseless linear map applied to
the last layer's outputs. Both default to the identity.

Ghost neurons are the trailing ``ghosts`` neurons of a layer. They receive
no input and their noise-free output is exactly zero.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.activations import Activation
from core.exceptions import TopologyError

logger = logging.getLogger(__name__)


def _frozen(array: Optional[np.ndarray], ndim: int) -> Optional[np.ndarray]:
    """Copy to a read-only float64 array (or None)."""
    if array is None:
        return None
    out = np.array(array, dtype=np.float64, copy=True)
    out = out.reshape(-1) if ndim == 1 else np.atleast_2d(out)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LayerSpec:
    """One layer: width I_n, activation f and optional bias."""
    width: int
    activation: Activation = field(default_factory=Activation.linear)
    bias: Optional[np.ndarray] = None
    ghosts: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'width', int(self.width))
        object.__setattr__(self, 'ghosts', int(self.ghosts))
        object.__setattr__(self, 'bias', _frozen(self.bias, 1))

    @property
    def real_width(self) -> int:
        return self.width - self.ghosts

    @property
    def ghost_mask(self) -> np.ndarray:
        mask = np.zeros(self.width, dtype=bool)
        if self.ghosts:
            mask[-self.ghosts:] = True
        return mask


@dataclass(frozen=True)
class LayerState:
    """Pre-activation a, noise-free output x and noisy output y of a layer."""
    a: np.ndarray
    x: np.ndarray
    y: np.ndarray


@dataclass(frozen=True, eq=False)
class NetworkTopology:
    """Immutable feedforward network description."""
    layers: Tuple[LayerSpec, ...]
    weights: Tuple[np.ndarray, ...]
    input_map: Optional[np.ndarray] = None
    readout: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, 'layers', tuple(self.layers))
        object.__setattr__(self, 'weights', tuple(_frozen(w, 2) for w in self.weights))
        if self.input_map is not None:
            imap = np.array(self.input_map, dtype=np.int64, copy=True).reshape(-1)
            imap.setflags(write=False)
            object.__setattr__(self, 'input_map', imap)
        object.__setattr__(self, 'readout', _frozen(self.readout, 2))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def widths(self) -> List[int]:
        return [layer.width for layer in self.layers]

    @property
    def input_dim(self) -> int:
        if self.input_map is None:
            return self.layers[0].real_width
        mapped = self.input_map[self.input_map >= 0]
        return int(mapped.max()) + 1 if mapped.size else 0

    @property
    def output_dim(self) -> int:
        if self.readout is None:
            return self.layers[-1].real_width
        return self.readout.shape[0]

    def effective_input_map(self) -> np.ndarray:
        if self.input_map is not None:
            return self.input_map
        first = self.layers[0]
        return np.concatenate([np.arange(first.real_width), -np.ones(first.ghosts, dtype=np.int64)])

    def effective_readout(self) -> np.ndarray:
        """Readout matrix R; the identity over real neurons when unset."""
        if self.readout is not None:
            return self.readout
        last = self.layers[-1]
        return np.eye(last.real_width, last.width)

    def replace(self, **changes) -> 'NetworkTopology':
        return replace(self, **changes)


def build_network(widths: Sequence[int], weights: Sequence[np.ndarray],
                  activations: Optional[Sequence[Activation]] = None,
                  biases: Optional[Sequence[Optional[np.ndarray]]] = None) -> NetworkTopology:
    """Convenience constructor from parallel per-layer lists."""
    activations = activations or [Activation.linear()] * len(widths)
    biases = biases or [None] * len(widths)
    layers = [LayerSpec(w, act, b) for w, act, b in zip(widths, activations, biases)]
    return NetworkTopology(tuple(layers), tuple(weights))


def validate_topology(net: NetworkTopology) -> List[str]:
    """
    Check every dimensional invariant of a network.

    Returns:
        List of violations, each naming the layer index. Empty means ok.
    """
    violations: List[str] = []
    if len(net.layers) < 2:
        violations.append("fewer than 2 layers")

    for n, layer in enumerate(net.layers):
        if layer.width < 1:
            violations.append(f"layer {n}: width must be positive, got {layer.width}")
        if not 0 <= layer.ghosts <= layer.width:
            violations.append(f"layer {n}: ghost count {layer.ghosts} outside [0, {layer.width}]")
        if layer.bias is not None:
            if layer.bias.shape != (layer.width,):
                violations.append(
                    f"layer {n}: bias has length {layer.bias.size}, expected {layer.width}")
            elif not np.all(np.isfinite(layer.bias)):
                violations.append(f"layer {n}: bias has non-finite entries")

    if len(net.weights) != max(len(net.layers) - 1, 0):
        violations.append(
            f"expected {max(len(net.layers) - 1, 0)} weight matrices, got {len(net.weights)}")

    for n, w in enumerate(net.weights[:max(len(net.layers) - 1, 0)]):
        expected = (net.layers[n + 1].width, net.layers[n].width)
        if w.shape != expected:
            violations.append(f"layer {n}: weights shaped {w.shape[0]}x{w.shape[1]}, "
                              f"expected {expected[0]}x{expected[1]}")
            continue
        if not np.all(np.isfinite(w)):
            violations.append(f"layer {n}: weights have non-finite entries")
        target = net.layers[n + 1]
        if target.ghosts and np.any(w[target.ghost_mask] != 0.0):
            violations.append(f"layer {n + 1}: ghost neurons must not receive input")

    if net.layers and net.input_map is not None:
        first = net.layers[0]
        if net.input_map.shape != (first.width,):
            violations.append(f"layer 0: input map has length {net.input_map.size}, "
                              f"expected {first.width}")
        elif np.any(net.input_map < -1):
            violations.append("layer 0: input map entries must be >= -1")
        elif first.ghosts and np.any(net.input_map[first.ghost_mask] != -1):
            violations.append("layer 0: ghost neurons must not read an input")

    if net.layers and net.readout is not None:
        last = net.layers[-1]
        if net.readout.shape[1] != last.width:
            violations.append(f"layer {len(net.layers) - 1}: readout has {net.readout.shape[1]} "
                              f"columns, expected {last.width}")
        elif not np.all(np.isfinite(net.readout)):
            violations.append("readout has non-finite entries")

    return violations


def ensure_valid(net: NetworkTopology) -> None:
    """Raise TopologyError listing every violation."""
    violations = validate_topology(net)
    if violations:
        raise TopologyError("Invalid network topology: " + "; ".join(violations))


def expand_inputs(net: NetworkTopology, inputs: np.ndarray) -> np.ndarray:
    """Map external inputs (T x input_dim) onto input-layer neurons (T x I_1)."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    if inputs.shape[1] != net.input_dim:
        raise TopologyError(f"input has length {inputs.shape[1]}, expected {net.input_dim}")
    imap = net.effective_input_map()
    expanded = np.zeros((inputs.shape[0], imap.size))
    live = imap >= 0
    expanded[:, live] = inputs[:, imap[live]]
    return expanded


def activate(layer: LayerSpec, a: np.ndarray) -> np.ndarray:
    """Noise-free layer output x = f(a); ghost neurons output exactly 0."""
    x = layer.activation(a)
    if layer.ghosts:
        x = np.array(x, copy=True)
        x[..., layer.ghost_mask] = 0.0
    return x


def preactivation(net: NetworkTopology, n: int, y_prev: np.ndarray) -> np.ndarray:
    """a_{n} for layer n >= 1 given the previous layer's outputs (T x I_{n-1})."""
    a = y_prev @ net.weights[n - 1].T
    bias = net.layers[n].bias
    if bias is not None:
        a = a + bias
    return a


def input_preactivation(net: NetworkTopology, inputs: np.ndarray) -> np.ndarray:
    a = expand_inputs(net, inputs)
    bias = net.layers[0].bias
    if bias is not None:
        a = a + bias
    return a


def read_out(net: NetworkTopology, y_last: np.ndarray) -> np.ndarray:
    """Apply the noiseless readout R to the last layer's outputs."""
    if net.readout is None:
        return y_last[..., :net.layers[-1].real_width]
    return y_last @ net.readout.T


def forward_batch(net: NetworkTopology, inputs: np.ndarray) -> np.ndarray:
    """Noise-free outputs for a batch of inputs (T x input_dim) -> (T x output_dim)."""
    x = activate(net.layers[0], input_preactivation(net, inputs))
    for n in range(1, net.depth):
        x = activate(net.layers[n], preactivation(net, n, x))
    return read_out(net, x)


def forward_noiseless(net: NetworkTopology, inputs: np.ndarray) -> Tuple[np.ndarray, List[LayerState]]:
    """
    Noise-free forward pass a_{n+1} = W^n x_n (+ bias), x_{n+1} = f(a_{n+1}).

    Args:
        net: validated network
        inputs: input vector of length input_dim

    Returns:
        Output vector and the LayerState of every layer (y equals x).
    """
    ensure_valid(net)
    u = np.asarray(inputs, dtype=np.float64)
    if u.ndim != 1:
        raise TopologyError(f"expected an input vector, got shape {u.shape}")

    # one-row batch: same arithmetic as noisy_forward and forward_batch
    states: List[LayerState] = []
    a = input_preactivation(net, u)
    x = activate(net.layers[0], a)
    states.append(LayerState(a=a[0], x=x[0], y=x[0]))
    for n in range(1, net.depth):
        a = preactivation(net, n, x)
        x = activate(net.layers[n], a)
        states.append(LayerState(a=a[0], x=x[0], y=x[0]))
    return read_out(net, x)[0], states
