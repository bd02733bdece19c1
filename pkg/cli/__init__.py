"""
Command-line interface.
"""

from .commands import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, build_parser, main

__all__ = ['EXIT_CONFIG', 'EXIT_OK', 'EXIT_RUNTIME', 'build_parser', 'main']
