"""
Base Experiment Class

Foundation of the experiment runners behind the command-line subcommands.
Provides structured activity logging, error handling, timing and the
output directory contract: every run writes its CSV artifacts and the
effective configuration into the output directory.
"""

import json
import logging
import os
import time
import traceback
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

import pandas as pd

from config.experiment_config import ExperimentConfig
from config.settings_manager import SettingsManager
from core.exceptions import NoiseNetError


class ExperimentOutputError(NoiseNetError):
    """An experiment produced output that failed validation."""


class BaseExperiment(ABC):
    """
    Abstract base class for experiment runners.

    Subclasses implement process(), returning a dict with at least
    'artifacts' (paths written) and 'summary' (plain values).
    """

    def __init__(self, experiment_name: str, config: ExperimentConfig,
                 settings: Optional[SettingsManager] = None):
        """
        Initialize the experiment.

        Args:
            experiment_name: name used for logging and identification
            config: typed experiment configuration
            settings: settings manager whose effective configuration is echoed
        """
        self.experiment_name = experiment_name
        self.config = config
        self.settings = settings
        self.logger = logging.getLogger(f'experiments.{experiment_name}')
        self.start_time = time.time()
        self.processed_count = 0
        self.error_count = 0
        self.logger.info(f"Experiment {experiment_name} initialized, output in {config.runtime.out}")

    @property
    def out_dir(self) -> str:
        return self.config.runtime.out

    @property
    def n_jobs(self) -> int:
        return self.config.runtime.threads

    def output_path(self, filename: str) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        return os.path.join(self.out_dir, filename)

    def write_csv(self, table: pd.DataFrame, filename: str) -> str:
        path = self.output_path(filename)
        table.to_csv(path, index=False)
        self.log_activity(f"Wrote {filename}", level='debug', rows=len(table), path=path)
        return path

    def _serialize_for_logging(self, obj: Any) -> Any:
        """
        Serialize object for JSON logging, handling non-serializable types.

        Args:
            obj: Object to serialize

        Returns:
            Serializable representation of the object
        """
        if isinstance(obj, (str, int, float, bool, type(None))):
            return obj
        elif isinstance(obj, (list, tuple)):
            return [self._serialize_for_logging(item) for item in obj]
        elif isinstance(obj, dict):
            return {str(k): self._serialize_for_logging(v) for k, v in obj.items()}
        return str(obj)

    def log_activity(self, message: str, level: str = 'info', **kwargs):
        """
        Log experiment activity with structured data.

        Args:
            message: Log message
            level: Log level (debug, info, warning, error)
            **kwargs: Additional structured data to log
        """
        log_data = {
            'experiment': self.experiment_name,
            'processed_count': self.processed_count,
            'error_count': self.error_count,
            'uptime_seconds': round(time.time() - self.start_time, 3),
        }
        for key, value in kwargs.items():
            log_data[key] = self._serialize_for_logging(value)

        log_message = f"{message} | {json.dumps(log_data)}"
        getattr(self.logger, level if level in ('debug', 'info', 'warning', 'error') else 'info')(log_message)

    def handle_error(self, error: Exception, context: Optional[Dict[str, Any]] = None):
        """
        Log an error with its type, message, traceback and context.

        Args:
            error: Exception that occurred
            context: Additional context about the error
        """
        self.error_count += 1
        self.log_activity(
            f"Error in {self.experiment_name}: {error}",
            level='error',
            error_type=type(error).__name__,
            error_message=str(error),
            traceback=traceback.format_exc(),
            context=context or {},
        )

    def get_performance_metrics(self) -> Dict[str, Any]:
        return {
            'experiment_name': self.experiment_name,
            'uptime_seconds': time.time() - self.start_time,
            'processed_count': self.processed_count,
            'error_count': self.error_count,
        }

    @abstractmethod
    def process(self) -> Dict[str, Any]:
        """
        Run the experiment.

        Returns:
            Dict with 'artifacts' and 'summary'
        """

    def validate_output(self, output: Dict[str, Any]) -> bool:
        """Every artifact listed must exist."""
        if 'artifacts' not in output or 'summary' not in output:
            return False
        return all(os.path.exists(path) for path in output['artifacts'])

    def run(self) -> Dict[str, Any]:
        """
        Run the experiment with error handling and timing.

        The effective configuration is echoed into the output directory
        before processing starts.

        Returns:
            Dict: Processed results
        """
        start_time = time.time()
        try:
            if self.settings is not None:
                self.settings.echo_to(self.out_dir)
            result = self.process()
            if not self.validate_output(result):
                raise ExperimentOutputError(f"{self.experiment_name} output validation failed")

            processing_time = time.time() - start_time
            self.processed_count += 1
            self.log_activity(
                f"Finished in {processing_time:.2f}s",
                level='info',
                processing_time=processing_time,
                artifacts=result['artifacts'],
                summary=result['summary'],
            )
            return result
        except Exception as e:
            self.handle_error(e, {'out': self.out_dir})
            raise
