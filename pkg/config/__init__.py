"""
Configuration Management Module

TOML experiment settings with defaults and overrides, typed experiment and
runtime configuration, and the logging setup.
"""

from .experiment_config import ExperimentConfig, MnistConfig
from .logging_config import LOGGING, configure_logging
from .runtime_config import RuntimeConfig
from .settings_manager import CONFIG_ECHO_FILE, SettingsManager

__all__ = [
    'CONFIG_ECHO_FILE',
    'LOGGING',
    'ExperimentConfig',
    'MnistConfig',
    'RuntimeConfig',
    'SettingsManager',
    'configure_logging',
]
