#!/usr/bin/env python
"""Command-line utility for noise propagation experiments."""
import sys


def main():
    """Run one experiment subcommand."""
    from cli.commands import main as run_command
    sys.exit(run_command(sys.argv[1:]))


if __name__ == '__main__':
    main()
