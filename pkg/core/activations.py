"""
Activation functions for network layers.

Two kinds are supported: the identity and a parameterised sigmoid
1 / (1 + exp(-g * (x - c))). The standard sigmoid is the special case
g = 1, c = 0.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict

import numpy as np
from scipy.special import expit

from core.exceptions import TopologyError

# expit rounds to exactly 0 or 1 once |g*(x-c)| exceeds ~37 (upper) or ~745 (lower)
_SIGMOID_LOW = np.nextafter(0.0, 1.0)
_SIGMOID_HIGH = np.nextafter(1.0, 0.0)


class ActivationKind(Enum):
    """Supported activation kinds."""
    LINEAR = "linear"
    SIGMOID = "sigmoid"


@dataclass(frozen=True)
class Activation:
    """Activation function f(.) of a layer."""
    kind: ActivationKind = ActivationKind.LINEAR
    gain: float = 1.0
    offset: float = 0.0

    @classmethod
    def linear(cls) -> 'Activation':
        return cls(ActivationKind.LINEAR)

    @classmethod
    def sigmoid(cls, gain: float = 1.0, offset: float = 0.0) -> 'Activation':
        return cls(ActivationKind.SIGMOID, float(gain), float(offset))

    @classmethod
    def standard_sigmoid(cls) -> 'Activation':
        return cls.sigmoid(1.0, 0.0)

    @property
    def is_linear(self) -> bool:
        return self.kind is ActivationKind.LINEAR

    def __call__(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.float64)
        if self.is_linear:
            return a
        return np.clip(expit(self.gain * (a - self.offset)), _SIGMOID_LOW, _SIGMOID_HIGH)

    def derivative(self, a: np.ndarray) -> np.ndarray:
        """f'(a), used by first-order moment propagation."""
        a = np.asarray(a, dtype=np.float64)
        if self.is_linear:
            return np.ones_like(a)
        s = expit(self.gain * (a - self.offset))
        return self.gain * s * (1.0 - s)

    def to_dict(self) -> Dict[str, Any]:
        if self.is_linear:
            return {'kind': self.kind.value}
        return {'kind': self.kind.value, 'gain': self.gain, 'offset': self.offset}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Activation':
        kind = data.get('kind', 'linear')
        if kind == 'linear':
            return cls.linear()
        if kind in ('sigmoid', 'standard-sigmoid', 'standard_sigmoid'):
            if kind != 'sigmoid':
                return cls.standard_sigmoid()
            return cls.sigmoid(data.get('gain', 1.0), data.get('offset', 0.0))
        raise TopologyError(f"Unknown activation kind: {kind!r}")
