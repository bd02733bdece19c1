"""
Settings Manager

Experiment configuration loaded from a TOML file, completed with defaults
for every missing key, overridable from the command line and exported as
JSON next to the results so that a run can be reproduced from its output
directory alone.
"""

import copy
import json
import logging
import os
import sys
from typing import Any, Dict, Optional

from core.exceptions import ConfigurationError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

CONFIG_ECHO_FILE = 'config_used.json'

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')
GHOST_MODES = ('direct', 'weighted', 'adaptive')

DEFAULTS: Dict[str, Any] = {
    'network': {},
    'noise': {
        'da_u': 0.0,
        'da_c': 0.0,
        'dm_u': 0.0,
        'dm_c': 0.0,
    },
    'mitigation': {},
    'sim': {
        'k': 300,
        'seed': 0,
        'n_inputs': 1000,
        'analytic': True,
    },
    'mnist': {
        'data_dir': 'data/mnist',
        'model': 'models/mnist_784_100_10.json',
        'epochs': 30,
        'batch_size': 32,
        'learning_rate': 0.1,
        'momentum': 0.9,
        'train_seed': 0,
        'hidden': 100,
        'presentations': 1,
        'aggregate': 'single',
        'count': 500,
        'noisy_layers': [1, 2],
        'mitigated_layers': [1, 2],
        'plan': 'none',
        'pool_m': 4,
    },
    'runtime': {
        'out': 'results',
        'threads': 1,
        'log_level': 'INFO',
        'json_logs': False,
    },
}


class SettingsManager:
    """
    Layered experiment settings: defaults < config file < flag overrides.

    Values are addressed with dot notation ('sim.k', 'mitigation.ghost.mode').
    """

    def __init__(self, config_file: Optional[str] = None):
        """
        Initialize settings manager.

        Args:
            config_file: optional TOML file; defaults alone when None
        """
        self.config_file = config_file
        self.config_data: Dict[str, Any] = {}
        self.config_cache: Dict[str, Any] = {}
        self._load_configuration()

    def _load_configuration(self) -> None:
        """Load the TOML file (if any) and apply defaults."""
        self.config_data = {}
        if self.config_file is not None:
            if not os.path.exists(self.config_file):
                raise ConfigurationError(f"Config file not found: {self.config_file}")
            try:
                with open(self.config_file, 'rb') as f:
                    self.config_data = tomllib.load(f)
            except tomllib.TOMLDecodeError as e:
                raise ConfigurationError(f"Malformed config file {self.config_file}: {e}") from e
            logger.info(f"Loaded configuration from {self.config_file}")
        self._apply_defaults()

    def _apply_defaults(self) -> None:
        """Apply default configuration values only for missing keys."""
        for key, default_value in DEFAULTS.items():
            if key not in self.config_data:
                self.config_data[key] = copy.deepcopy(default_value)
            elif isinstance(self.config_data[key], dict):
                self._apply_nested_defaults(self.config_data[key], default_value)
            else:
                raise ConfigurationError(f"Config section [{key}] must be a table")

    def _apply_nested_defaults(self, current: Dict[str, Any], defaults: Dict[str, Any]) -> None:
        """Apply default values recursively for nested dictionaries."""
        for key, default_value in defaults.items():
            if key not in current:
                current[key] = copy.deepcopy(default_value)
            elif isinstance(default_value, dict) and isinstance(current[key], dict):
                self._apply_nested_defaults(current[key], default_value)

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value by key.

        Args:
            key: Configuration key (supports dot notation for nested values)
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        if key in self.config_cache:
            return self.config_cache[key]
        value = self._get_nested_value(key, default)
        self.config_cache[key] = value
        return value

    def set(self, key: str, value: Any) -> None:
        """Set configuration value (dot notation)."""
        self._set_nested_value(key, value)
        self.config_cache.clear()

    def apply_overrides(self, overrides: Dict[str, Any]) -> None:
        """Apply flag overrides; None values mean 'flag not given'."""
        for key, value in overrides.items():
            if value is not None:
                self.set(key, value)
                logger.debug(f"Override {key} = {value!r}")

    def _get_nested_value(self, key: str, default: Any = None) -> Any:
        current: Any = self.config_data
        for k in key.split('.'):
            if isinstance(current, dict) and k in current:
                current = current[k]
            else:
                return default
        return current

    def _set_nested_value(self, key: str, value: Any) -> None:
        keys = key.split('.')
        current = self.config_data
        for k in keys[:-1]:
            if not isinstance(current.get(k), dict):
                current[k] = {}
            current = current[k]
        current[keys[-1]] = value

    def get_section(self, section_name: str) -> Dict[str, Any]:
        """Get entire configuration section."""
        return self.get(section_name, {})

    def validate_configuration(self) -> Dict[str, Any]:
        """
        Validate current configuration.

        Returns:
            Dictionary with 'valid', 'errors', 'warnings' and 'sections_validated'.
        """
        validation_results: Dict[str, Any] = {
            'valid': True,
            'errors': [],
            'warnings': [],
            'sections_validated': [],
        }
        for section, validator in (('network', self._validate_network_settings),
                                   ('noise', self._validate_noise_settings),
                                   ('mitigation', self._validate_mitigation_settings),
                                   ('sim', self._validate_sim_settings),
                                   ('mnist', self._validate_mnist_settings),
                                   ('runtime', self._validate_runtime_settings)):
            result = validator()
            validation_results['sections_validated'].append(section)
            validation_results['errors'].extend(result.get('errors', []))
            validation_results['warnings'].extend(result.get('warnings', []))

        validation_results['valid'] = len(validation_results['errors']) == 0
        return validation_results

    def _validate_network_settings(self) -> Dict[str, Any]:
        errors = []
        network = self.get_section('network')
        if 'file' in network and 'generator' in network:
            errors.append("network: give either file or generator, not both")
        if 'generator' in network and not isinstance(network['generator'], dict):
            errors.append("network.generator must be a table")
        if 'file' in network and not os.path.exists(network['file']):
            errors.append(f"network.file not found: {network['file']}")
        return {'errors': errors, 'warnings': []}

    def _validate_noise_settings(self) -> Dict[str, Any]:
        errors = []
        warnings = []
        noise = self.get_section('noise')
        for name in ('da_u', 'da_c', 'dm_u', 'dm_c'):
            value = noise.get(name, 0.0)
            if not isinstance(value, (int, float)) or value < 0:
                errors.append(f"noise.{name} must be a non-negative number")
            elif value > 0.1:
                warnings.append(f"noise.{name}={value} is far above the usual 1e-5..1e-3 range")
        layers = noise.get('layers')
        if layers is not None and (not isinstance(layers, list) or any(
                not isinstance(n, int) or n < 0 for n in layers)):
            errors.append("noise.layers must be a list of non-negative layer indices")
        return {'errors': errors, 'warnings': warnings}

    def _validate_mitigation_settings(self) -> Dict[str, Any]:
        errors = []
        ghost = self.get('mitigation.ghost')
        if ghost is not None:
            mode = ghost.get('mode', 'adaptive')
            if mode not in GHOST_MODES:
                errors.append(f"mitigation.ghost.mode must be one of {', '.join(GHOST_MODES)}")
            if mode == 'weighted' and not isinstance(ghost.get('wg'), (int, float)):
                errors.append("mitigation.ghost.wg is required for weighted mode")
        pool = self.get('mitigation.pool')
        if pool is not None:
            m = pool.get('m', 1)
            if not isinstance(m, int) or m < 1:
                errors.append("mitigation.pool.m must be a positive integer")
        return {'errors': errors, 'warnings': []}

    def _validate_sim_settings(self) -> Dict[str, Any]:
        errors = []
        warnings = []
        k = self.get('sim.k')
        if not isinstance(k, int) or k < 2:
            errors.append("sim.k must be an integer >= 2")
        elif k < 100:
            warnings.append(f"sim.k={k} gives a very noisy variance estimate")
        seed = self.get('sim.seed')
        if not isinstance(seed, int) or seed < 0:
            errors.append("sim.seed must be a non-negative integer")
        inputs = self.get('sim.inputs')
        if inputs is None:
            n_inputs = self.get('sim.n_inputs')
            if not isinstance(n_inputs, int) or n_inputs < 1:
                errors.append("sim.n_inputs must be a positive integer")
        elif not isinstance(inputs, list) or not inputs:
            errors.append("sim.inputs must be a non-empty list")
        return {'errors': errors, 'warnings': warnings}

    def _validate_mnist_settings(self) -> Dict[str, Any]:
        errors = []
        mnist = self.get_section('mnist')
        for name in ('epochs', 'batch_size', 'hidden', 'presentations', 'count', 'pool_m'):
            value = mnist.get(name)
            if not isinstance(value, int) or value < 1:
                errors.append(f"mnist.{name} must be a positive integer")
        if mnist.get('aggregate') not in ('single', 'mean'):
            errors.append("mnist.aggregate must be 'single' or 'mean'")
        if mnist.get('plan') not in ('none', 'combined', 'combined-fixed'):
            errors.append("mnist.plan must be one of none, combined, combined-fixed")
        return {'errors': errors, 'warnings': []}

    def _validate_runtime_settings(self) -> Dict[str, Any]:
        errors = []
        runtime = self.get_section('runtime')
        if str(runtime.get('log_level', 'INFO')).upper() not in LOG_LEVELS:
            errors.append(f"runtime.log_level must be one of {', '.join(LOG_LEVELS)}")
        threads = runtime.get('threads', 1)
        if not isinstance(threads, int) or threads == 0 or threads < -1:
            errors.append("runtime.threads must be a positive integer or -1")
        return {'errors': errors, 'warnings': []}

    def ensure_valid(self) -> Dict[str, Any]:
        """Raise ConfigurationError when validation reports errors; log warnings."""
        results = self.validate_configuration()
        for warning in results['warnings']:
            logger.warning(warning)
        if not results['valid']:
            raise ConfigurationError("Invalid configuration: " + "; ".join(results['errors']))
        return results

    def export_configuration(self, file_path: str) -> None:
        """Export current configuration to specified file."""
        os.makedirs(os.path.dirname(os.path.abspath(file_path)), exist_ok=True)
        with open(file_path, 'w') as f:
            json.dump(self.config_data, f, indent=2, sort_keys=True, default=str)
        logger.info(f"Configuration exported to {file_path}")

    def echo_to(self, out_dir: str) -> str:
        """Write the effective configuration into an output directory."""
        path = os.path.join(out_dir, CONFIG_ECHO_FILE)
        self.export_configuration(path)
        return path

    def merge(self, data: Dict[str, Any]) -> None:
        """Deep merge a dictionary into the configuration."""
        self._deep_merge(self.config_data, data)
        self.config_cache.clear()

    def _deep_merge(self, target: Dict[str, Any], source: Dict[str, Any]) -> None:
        """Deep merge source dictionary into target dictionary."""
        for key, value in source.items():
            if key in target and isinstance(target[key], dict) and isinstance(value, dict):
                self._deep_merge(target[key], value)
            else:
                target[key] = value
