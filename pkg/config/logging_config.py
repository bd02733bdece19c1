"""
Logging configuration.

Library modules log through ``logging.getLogger(__name__)``; the handlers
installed here render those records with structlog's ProcessorFormatter,
as key-value lines on the console or as JSON lines when ``json_logs`` is
set.
"""

import logging
import logging.config
import os
from typing import Any, Dict, Optional

import structlog

PACKAGES = ('core', 'noise', 'analytics', 'mitigation', 'sim', 'mnist', 'experiments', 'config', 'cli')

_PRE_CHAIN = [
    structlog.stdlib.add_log_level,
    structlog.stdlib.add_logger_name,
    structlog.processors.TimeStamper(fmt='iso'),
]


def build_logging_config(level: str = 'INFO', log_file: Optional[str] = None,
                         json_logs: bool = False) -> Dict[str, Any]:
    """dictConfig for the console handler and an optional file handler."""
    renderer = (structlog.processors.JSONRenderer() if json_logs
                else structlog.dev.ConsoleRenderer(colors=False))
    handlers = ['console']
    config: Dict[str, Any] = {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'verbose': {
                '()': structlog.stdlib.ProcessorFormatter,
                'processors': [structlog.stdlib.ProcessorFormatter.remove_processors_meta,
                               structlog.processors.JSONRenderer()],
                'foreign_pre_chain': _PRE_CHAIN,
            },
            'simple': {
                '()': structlog.stdlib.ProcessorFormatter,
                'processors': [structlog.stdlib.ProcessorFormatter.remove_processors_meta, renderer],
                'foreign_pre_chain': _PRE_CHAIN,
            },
        },
        'handlers': {
            'console': {
                'level': 'DEBUG',
                'class': 'logging.StreamHandler',
                'formatter': 'simple',
            },
        },
        'root': {
            'handlers': handlers,
            'level': 'WARNING',
        },
        'loggers': {},
    }
    if log_file:
        os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
        config['handlers']['file'] = {
            'level': 'DEBUG',
            'class': 'logging.FileHandler',
            'filename': log_file,
            'formatter': 'verbose',
        }
        handlers.append('file')
    for package in PACKAGES:
        config['loggers'][package] = {
            'handlers': handlers,
            'level': level.upper(),
            'propagate': False,
        }
    return config


LOGGING = build_logging_config()


def configure_logging(level: str = 'INFO', log_file: Optional[str] = None,
                      json_logs: bool = False) -> None:
    """Install the logging configuration for a command-line run."""
    logging.config.dictConfig(build_logging_config(level, log_file, json_logs))
    logging.captureWarnings(True)
