"""
Noise Model

Additive and multiplicative, correlated and uncorrelated Gaussian noise on
a layer's noise-free output x:

    y_i = sqrt(2 D_A^C) xi^{C,A} + sqrt(2 D_A^U) xi^{U,A}_i
          + x_i (1 + sqrt(2 D_M^C) xi^{C,M}) (1 + sqrt(2 D_M^U) xi^{U,M}_i)

Correlated draws are shared by every neuron of a layer (ghost neurons
included) and are independent across layers. With the four sources
independent, E[y_i] = E[x_i] and

    Var[y_i] = 2(D_A^U + D_A^C) + (1 + 2 D_M^U)(1 + 2 D_M^C)(E^2[x_i] + Var[x_i]) - E^2[x_i]
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, Optional, Union

import numpy as np

from core.exceptions import NoiseSpecError
from noise.rng import NoiseTag, RngStream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseSpec:
    """
    Noise intensities and the set of noisy layers.

    ``layers`` is None when every layer is noisy; otherwise only the listed
    layer indices receive noise and the rest contribute exactly zero.
    """
    da_u: float = 0.0
    da_c: float = 0.0
    dm_u: float = 0.0
    dm_c: float = 0.0
    layers: Optional[FrozenSet[int]] = field(default=None)

    def __post_init__(self):
        for name in ('da_u', 'da_c', 'dm_u', 'dm_c'):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0.0:
                raise NoiseSpecError(f"{name} must be a finite non-negative intensity, got {value}")
            object.__setattr__(self, name, value)
        if self.layers is not None:
            layers = frozenset(int(n) for n in self.layers)
            if any(n < 0 for n in layers):
                raise NoiseSpecError(f"layer indices must be non-negative, got {sorted(layers)}")
            object.__setattr__(self, 'layers', layers)

    @property
    def is_noiseless(self) -> bool:
        return self.da_u == self.da_c == self.dm_u == self.dm_c == 0.0

    @property
    def has_multiplicative(self) -> bool:
        return self.dm_u > 0.0 or self.dm_c > 0.0

    def enabled(self, layer: int) -> bool:
        return self.layers is None or layer in self.layers

    def with_layers(self, layers: Optional[Iterable[int]]) -> 'NoiseSpec':
        return NoiseSpec(self.da_u, self.da_c, self.dm_u, self.dm_c,
                         None if layers is None else frozenset(layers))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'da_u': self.da_u,
            'da_c': self.da_c,
            'dm_u': self.dm_u,
            'dm_c': self.dm_c,
            'layers': None if self.layers is None else sorted(self.layers),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'NoiseSpec':
        layers = data.get('layers')
        return cls(
            da_u=data.get('da_u', 0.0),
            da_c=data.get('da_c', 0.0),
            dm_u=data.get('dm_u', 0.0),
            dm_c=data.get('dm_c', 0.0),
            layers=None if layers is None else frozenset(layers),
        )


def apply_layer_noise(x: np.ndarray, spec: NoiseSpec, rng: RngStream, layer: int,
                      trials: Union[int, np.ndarray], timestep: int = 0) -> np.ndarray:
    """
    Noisy outputs of one layer for a batch of trials.

    Args:
        x: noise-free outputs, shape (I,) shared by all trials or (T, I) per trial
        spec: noise intensities
        rng: counter-based stream
        layer: layer index (stream coordinate, and checked against spec.layers)
        trials: trial indices, one per row of the result
        timestep: timestep coordinate

    Returns:
        Array of shape (T, I).
    """
    trials = np.atleast_1d(np.asarray(trials, dtype=np.int64))
    x = np.asarray(x, dtype=np.float64)
    width = x.shape[-1]
    y = np.broadcast_to(x, (trials.size, width)).copy()
    if spec.is_noiseless or not spec.enabled(layer):
        return y

    if spec.has_multiplicative:
        factor = np.ones((trials.size, 1))
        if spec.dm_c > 0.0:
            xi = rng.normals(layer, NoiseTag.MULTIPLICATIVE_CORRELATED, trials, timestep, 1)
            factor = factor * (1.0 + np.sqrt(2.0 * spec.dm_c) * xi)
        if spec.dm_u > 0.0:
            xi = rng.normals(layer, NoiseTag.MULTIPLICATIVE_UNCORRELATED, trials, timestep, width)
            factor = factor * (1.0 + np.sqrt(2.0 * spec.dm_u) * xi)
        y *= factor
    if spec.da_c > 0.0:
        y += np.sqrt(2.0 * spec.da_c) * rng.normals(
            layer, NoiseTag.ADDITIVE_CORRELATED, trials, timestep, 1)
    if spec.da_u > 0.0:
        y += np.sqrt(2.0 * spec.da_u) * rng.normals(
            layer, NoiseTag.ADDITIVE_UNCORRELATED, trials, timestep, width)
    return y


def sample_noisy_output(x: np.ndarray, spec: NoiseSpec, rng: RngStream, layer: int,
                        trial: int, timestep: int = 0) -> np.ndarray:
    """Noisy output vector y of one layer for a single trial."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NoiseSpecError("noise-free output contains non-finite values")
    return apply_layer_noise(x, spec, rng, layer, int(trial), timestep)[0]


def layer_noise_variance(mean_x: np.ndarray, var_x: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """
    Per-neuron Var[y] of a noisy layer given E[x] and Var[x].

    Reduces to 2 D_A + Var[x] for additive-only noise and to
    2 D_M (E^2[x] + Var[x]) + Var[x] for multiplicative-only noise.
    """
    mean_x = np.asarray(mean_x, dtype=np.float64)
    var_x = np.asarray(var_x, dtype=np.float64)
    if np.any(var_x < 0.0):
        raise NoiseSpecError("var_x must be non-negative")
    second_moment = mean_x ** 2 + var_x
    gain = (1.0 + 2.0 * spec.dm_u) * (1.0 + 2.0 * spec.dm_c)
    return 2.0 * (spec.da_u + spec.da_c) + gain * second_moment - mean_x ** 2


def layer_noise_covariance(mean_x: np.ndarray, cov_x: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """
    Full covariance of y within one layer.

    Correlated sources couple every pair of neurons: additive correlated noise
    adds 2 D_A^C everywhere, multiplicative correlated noise adds
    2 D_M^C E[x_j] E[x_k] and scales the incoming covariance.
    """
    mean_x = np.asarray(mean_x, dtype=np.float64)
    cov_x = np.asarray(cov_x, dtype=np.float64)
    width = mean_x.size
    cov = (1.0 + 2.0 * spec.dm_c) * cov_x
    cov = cov + 2.0 * spec.dm_c * np.outer(mean_x, mean_x)
    cov = cov + 2.0 * spec.da_c * np.ones((width, width))
    diagonal = 2.0 * spec.da_u + (1.0 + 2.0 * spec.dm_c) * 2.0 * spec.dm_u * (np.diag(cov_x) + mean_x ** 2)
    cov[np.diag_indices(width)] += diagonal
    return cov

