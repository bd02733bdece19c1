"""
Runtime Configuration Module

Process-level settings of an experiment run: output directory, worker
threads and logging.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from config.settings_manager import LOG_LEVELS


@dataclass
class RuntimeConfig:
    """
    Runtime settings.

    ``threads`` caps the joblib workers used for trial blocks; -1 uses
    every core.
    """
    out: str = 'results'
    threads: int = 1
    log_level: str = 'INFO'
    json_logs: bool = False
    log_file: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary."""
        return {
            'out': self.out,
            'threads': self.threads,
            'log_level': self.log_level,
            'json_logs': self.json_logs,
            'log_file': self.log_file,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RuntimeConfig':
        """Create configuration from dictionary, ignoring unknown keys."""
        known = {key: data[key] for key in cls.__dataclass_fields__ if key in data}
        return cls(**known)

    def validate(self) -> Dict[str, List[str]]:
        """
        Validate configuration values.

        Returns:
            Dictionary with validation errors (empty if valid)
        """
        errors = {}
        if self.log_level.upper() not in LOG_LEVELS:
            errors['log_level'] = [f"Invalid log level. Must be one of: {', '.join(LOG_LEVELS)}"]
        if self.threads == 0 or self.threads < -1:
            errors['threads'] = ["Must be a positive integer or -1"]
        if not self.out:
            errors['out'] = ["Output directory must not be empty"]
        return errors
