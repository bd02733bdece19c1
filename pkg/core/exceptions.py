"""
Exception hierarchy for the noise propagation toolkit.

Every library error derives from NoiseNetError so callers (the experiment
runners and the command line front end) can separate configuration
problems from runtime failures.
"""

from typing import Any, Dict, Optional


class NoiseNetError(Exception):
    """Base class for all library errors."""


class TopologyError(NoiseNetError, ValueError):
    """Invalid network topology or input dimensions."""


class NoiseSpecError(NoiseNetError, ValueError):
    """Invalid noise specification."""


class MitigationError(NoiseNetError, ValueError):
    """Invalid mitigation plan or transform request."""


class SimulationError(NoiseNetError, ValueError):
    """Invalid Monte Carlo request (too few trials, empty sweep, ...)."""


class AnalyticsError(NoiseNetError, ValueError):
    """Invalid input to a closed-form statistic or predictor."""


class IdxFormatError(NoiseNetError, ValueError):
    """Malformed IDX file."""


class TrainingDivergedError(NoiseNetError, RuntimeError):
    """Training loss became non-finite."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigurationError(NoiseNetError):
    """Malformed configuration, missing data files or unknown subcommand."""
