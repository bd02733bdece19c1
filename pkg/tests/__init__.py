"""
Test suite for the noise propagation toolkit.

Suites are unittest.TestCase classes collected by pytest. Monte Carlo
checks with 10^5 or more trials are marked ``slow``; tests that need the
real MNIST files are marked ``mnist`` and read them from the directory
named by NOISENET_MNIST_DIR.
"""

import os
from typing import Optional
from unittest import TestCase

MNIST_DIR_ENV = 'NOISENET_MNIST_DIR'


def mnist_dir() -> Optional[str]:
    """Directory holding the MNIST IDX files, or None when unavailable."""
    path = os.environ.get(MNIST_DIR_ENV)
    if path and os.path.isdir(path):
        return path
    return None


__all__ = [
    'MNIST_DIR_ENV',
    'TestCase',
    'mnist_dir',
]
