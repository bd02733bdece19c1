"""
Test Runner

Runs the suites by group through pytest:

    python tests/run_tests.py               # fast suites
    python tests/run_tests.py --slow        # 10^5-10^6 trial Monte Carlo checks
    python tests/run_tests.py --mnist       # real-data MNIST checks (NOISENET_MNIST_DIR)
    python tests/run_tests.py --all --coverage
"""

import argparse
import os
import sys

import pytest

project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

GROUPS = {
    'fast': 'not slow and not mnist',
    'slow': 'slow',
    'mnist': 'mnist',
    'all': '',
}


class ComprehensiveTestRunner:
    """
    Runs test groups and modules and keeps a per-group result record.
    """

    def __init__(self, verbosity: int = 1, coverage: bool = False):
        self.test_modules = [
            'tests/test_core.py',
            'tests/test_noise.py',
            'tests/test_analytics.py',
            'tests/test_mitigation.py',
            'tests/test_sim.py',
            'tests/test_mnist.py',
            'tests/test_config.py',
            'tests/test_experiments.py',
            'tests/test_cli.py',
            'tests/test_properties.py',
        ]
        self.verbosity = verbosity
        self.coverage = coverage
        self.test_results = {}

    def _args(self, targets, marker: str):
        args = list(targets) + ['-m', marker]
        if self.verbosity > 1:
            args.append('-v')
        elif self.verbosity == 0:
            args.append('-q')
        if self.coverage:
            args += ['--cov=' + package for package in
                     ('core', 'noise', 'analytics', 'mitigation', 'sim', 'mnist', 'config',
                      'experiments', 'cli')]
            args.append('--cov-report=term-missing')
        return args

    def run_group(self, group: str) -> bool:
        """
        Run one marker group over every test module.

        Returns:
            bool: True if the group passed (or collected nothing)
        """
        print(f"\nRunning {group} tests")
        print("-" * 50)
        code = pytest.main(self._args(self.test_modules, GROUPS[group]))
        success = code in (pytest.ExitCode.OK, pytest.ExitCode.NO_TESTS_COLLECTED)
        self.test_results[group] = success
        return success

    def run_specific_test_module(self, module_name: str) -> bool:
        print(f"\nRunning tests for module: {module_name}")
        print("-" * 50)
        code = pytest.main(self._args([module_name], GROUPS['all']))
        success = code == pytest.ExitCode.OK
        self.test_results[module_name] = success
        return success

    def _print_test_summary(self) -> None:
        print("\n" + "=" * 80)
        print("TEST SUMMARY")
        print("=" * 80)
        for name, success in self.test_results.items():
            print(f"  {name}: {'PASS' if success else 'FAIL'}")
        overall = all(self.test_results.values())
        print(f"\nOverall Status: {'SUCCESS' if overall else 'FAILURE'}")
        if not overall:
            print("\nRECOMMENDATIONS:")
            print("1. Review failed test output above")
            print("2. Verify all dependencies from requirements.txt are installed")
            print(f"3. For mnist tests, point NOISENET_MNIST_DIR at the IDX files "
                  f"(python download_mnist.py)")


def main():
    """Main entry point for test runner."""
    parser = argparse.ArgumentParser(description='Noise propagation toolkit test runner')
    parser.add_argument('--module', help='run every test in one module file')
    parser.add_argument('--slow', action='store_true', help='run the slow Monte Carlo group')
    parser.add_argument('--mnist', action='store_true', help='run the real-data MNIST group')
    parser.add_argument('--all', action='store_true', help='run every group')
    parser.add_argument('--coverage', action='store_true', help='collect coverage with pytest-cov')
    parser.add_argument('--verbosity', type=int, default=1, help='output verbosity (0-2)')
    args = parser.parse_args()

    runner = ComprehensiveTestRunner(args.verbosity, args.coverage)
    try:
        if args.module:
            success = runner.run_specific_test_module(args.module)
        else:
            groups = ['fast']
            if args.slow or args.all:
                groups.append('slow')
            if args.mnist or args.all:
                groups.append('mnist')
            success = all([runner.run_group(group) for group in groups])
        runner._print_test_summary()
        sys.exit(0 if success else 1)
    except KeyboardInterrupt:
        print("\n\nTests interrupted by user")
        sys.exit(1)


if __name__ == '__main__':
    main()
