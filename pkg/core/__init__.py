"""
Core domain types: activations, network topology and the noise-free forward pass.
"""

from .activations import Activation, ActivationKind
from .exceptions import (
    AnalyticsError,
    ConfigurationError,
    IdxFormatError,
    MitigationError,
    NoiseNetError,
    NoiseSpecError,
    SimulationError,
    TopologyError,
    TrainingDivergedError,
)
from .topology import (
    LayerSpec,
    LayerState,
    NetworkTopology,
    build_network,
    forward_batch,
    forward_noiseless,
    validate_topology,
)

__all__ = [
    'Activation',
    'ActivationKind',
    'AnalyticsError',
    'ConfigurationError',
    'IdxFormatError',
    'LayerSpec',
    'LayerState',
    'MitigationError',
    'NetworkTopology',
    'NoiseNetError',
    'NoiseSpecError',
    'SimulationError',
    'TopologyError',
    'TrainingDivergedError',
    'build_network',
    'forward_batch',
    'forward_noiseless',
    'validate_topology',
]
