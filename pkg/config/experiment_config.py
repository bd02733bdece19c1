"""
Experiment Configuration

Typed view of the settings: network source, noise, mitigation plan, Monte
Carlo settings, MNIST settings and runtime settings, built from a
SettingsManager once it has absorbed the config file and flag overrides.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config.runtime_config import RuntimeConfig
from config.settings_manager import SettingsManager
from core.exceptions import ConfigurationError, NoiseNetError
from core.network_io import load_network
from core.topology import NetworkTopology
from mitigation.plan import MitigationPlan
from mnist.trainer import TrainConfig
from noise.noise_model import NoiseSpec
from sim.engine import SimConfig
from sim.generators import network_from_generator_spec

logger = logging.getLogger(__name__)


@dataclass
class MnistConfig:
    """Data location, model path and evaluation settings for the MNIST experiments."""
    data_dir: str = 'data/mnist'
    model: str = 'models/mnist_784_100_10.json'
    presentations: int = 1
    aggregate: str = 'single'
    count: int = 500
    noisy_layers: Tuple[int, ...] = (1, 2)
    mitigated_layers: Tuple[int, ...] = (1, 2)
    plan: str = 'none'
    pool_m: int = 4

    def to_dict(self) -> Dict[str, Any]:
        return {
            'data_dir': self.data_dir,
            'model': self.model,
            'presentations': self.presentations,
            'aggregate': self.aggregate,
            'count': self.count,
            'noisy_layers': list(self.noisy_layers),
            'mitigated_layers': list(self.mitigated_layers),
            'plan': self.plan,
            'pool_m': self.pool_m,
        }


@dataclass
class ExperimentConfig:
    """
    Everything an experiment runner needs.

    Exactly one of ``network_file`` and ``network_generator`` is set for
    network-based subcommands.
    """
    noise: NoiseSpec
    plan: MitigationPlan
    sim: SimConfig
    train: TrainConfig
    mnist: MnistConfig
    runtime: RuntimeConfig
    network_file: Optional[str] = None
    network_generator: Optional[Dict[str, Any]] = None
    raw: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_settings(cls, manager: SettingsManager, require_network: bool = False) -> 'ExperimentConfig':
        """
        Build the typed configuration.

        Args:
            manager: settings with defaults and overrides applied
            require_network: enforce exactly one network source

        Raises:
            ConfigurationError: invalid settings or missing referenced files
        """
        manager.ensure_valid()
        network = manager.get_section('network')
        if require_network and ('file' in network) == ('generator' in network):
            raise ConfigurationError("exactly one of network.file and network.generator is required")

        try:
            noise = NoiseSpec.from_dict(manager.get_section('noise'))
            plan = MitigationPlan.from_dict(manager.get_section('mitigation'))
        except NoiseNetError as e:
            raise ConfigurationError(str(e)) from e

        inputs = manager.get('sim.inputs')
        sim = SimConfig(
            k=manager.get('sim.k'),
            seed=manager.get('sim.seed'),
            inputs=None if inputs is None else np.asarray(inputs, dtype=np.float64),
            n_inputs=manager.get('sim.n_inputs'),
            threads=manager.get('runtime.threads'),
            analytic=bool(manager.get('sim.analytic')),
        )
        train = TrainConfig(
            epochs=manager.get('mnist.epochs'),
            batch_size=manager.get('mnist.batch_size'),
            learning_rate=float(manager.get('mnist.learning_rate')),
            momentum=float(manager.get('mnist.momentum')),
            seed=manager.get('mnist.train_seed'),
            hidden=manager.get('mnist.hidden'),
        )
        mnist_section = manager.get_section('mnist')
        mnist = MnistConfig(
            data_dir=mnist_section['data_dir'],
            model=mnist_section['model'],
            presentations=mnist_section['presentations'],
            aggregate=mnist_section['aggregate'],
            count=mnist_section['count'],
            noisy_layers=tuple(mnist_section['noisy_layers']),
            mitigated_layers=tuple(mnist_section['mitigated_layers']),
            plan=mnist_section['plan'],
            pool_m=mnist_section['pool_m'],
        )
        runtime = RuntimeConfig.from_dict(manager.get_section('runtime'))

        config = cls(noise=noise, plan=plan, sim=sim, train=train, mnist=mnist, runtime=runtime,
                     network_file=network.get('file'), network_generator=network.get('generator'),
                     raw=manager.config_data)
        errors = config.validate()
        if errors:
            raise ConfigurationError("Invalid configuration: " + "; ".join(errors))
        return config

    def validate(self) -> List[str]:
        errors = list(self.plan.validate()) + self.sim.validate() + self.train.validate()
        for key, messages in self.runtime.validate().items():
            errors.extend(f"runtime.{key}: {message}" for message in messages)
        if self.network_file is not None and not os.path.exists(self.network_file):
            errors.append(f"network file not found: {self.network_file}")
        return errors

    def build_network(self) -> NetworkTopology:
        """Load or generate the configured network."""
        try:
            if self.network_file is not None:
                network, _ = load_network(self.network_file)
                return network
            if self.network_generator is not None:
                return network_from_generator_spec(self.network_generator)
        except (OSError, ValueError) as e:
            raise ConfigurationError(f"Cannot build network: {e}") from e
        raise ConfigurationError("no network source configured")
