"""
Command-line front end.

    python manage.py <subcommand> [--config FILE] [flags]

Subcommands: stats, snr-sweep, mnist-train, mnist-eval, mnist-snr.
Flags override values from the TOML config file. Exit codes: 0 success,
1 configuration error (bad flags, malformed config, missing files),
2 runtime failure.
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from config.experiment_config import ExperimentConfig
from config.logging_config import configure_logging
from config.settings_manager import LOG_LEVELS, SettingsManager
from core.exceptions import ConfigurationError, MitigationError, NoiseNetError
from experiments import EXPERIMENTS, NETWORK_SUBCOMMANDS
from mitigation.plan import NAMED_PLANS, MitigationPlan, parse_ghost_flag, parse_pool_flag

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class CommandLineParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as ConfigurationError."""

    def error(self, message: str):
        raise ConfigurationError(f"{self.prog}: {message}")


def _layer_list(value: str) -> List[int]:
    try:
        layers = [int(part) for part in value.split(',') if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated layer indices, got {value!r}") from exc
    if any(n < 0 for n in layers):
        raise argparse.ArgumentTypeError("layer indices must be non-negative")
    return layers


def _common_flags() -> argparse.ArgumentParser:
    p = CommandLineParser(add_help=False)
    p.add_argument('--config', help='TOML experiment configuration file')
    p.add_argument('--seed', type=int, help='RNG seed (sim.seed)')
    p.add_argument('--k', type=int, help='presentations per input (sim.k)')
    p.add_argument('--da-u', type=float, help='additive uncorrelated intensity D_A^U')
    p.add_argument('--da-c', type=float, help='additive correlated intensity D_A^C')
    p.add_argument('--dm-u', type=float, help='multiplicative uncorrelated intensity D_M^U')
    p.add_argument('--dm-c', type=float, help='multiplicative correlated intensity D_M^C')
    p.add_argument('--noise-layers', type=_layer_list, help='noisy layers, e.g. 1,2')
    p.add_argument('--ghost', help='ghost neurons: direct | wg=<value> | adaptive | none')
    p.add_argument('--ghost-layers', type=_layer_list, help='layers receiving a ghost neuron')
    p.add_argument('--pool', help='average pooling: m=<k>')
    p.add_argument('--pool-layers', type=_layer_list, help='layers to pool')
    p.add_argument('--plan', choices=NAMED_PLANS, help='preset mitigation plan')
    p.add_argument('--out', help='output directory (runtime.out)')
    p.add_argument('--threads', type=int, help='joblib workers, -1 for all cores')
    p.add_argument('--log-level', type=str.upper, choices=LOG_LEVELS, help='log level')
    p.add_argument('--log-file', help='also log to this file (JSON lines)')
    p.add_argument('--json-logs', action='store_true', default=None, help='JSON console logs')
    p.add_argument('--data-dir', help='directory holding the MNIST IDX files')
    p.add_argument('--model', help='trained model file')
    p.add_argument('--epochs', type=int, help='training epochs')
    p.add_argument('--presentations', type=int, help='noisy presentations per test image')
    p.add_argument('--aggregate', choices=('single', 'mean'), help='presentation aggregation')
    p.add_argument('--count', type=int, help='digits drawn for mnist-snr')
    return p


def build_parser() -> CommandLineParser:
    parser = CommandLineParser(
        prog='manage.py',
        description='Noise propagation and mitigation experiments for feedforward networks.',
    )
    subparsers = parser.add_subparsers(dest='subcommand', metavar='subcommand', required=True)
    common = _common_flags()
    helps = {
        'stats': 'connection-matrix statistics per layer',
        'snr-sweep': 'empirical and analytic SNR over an input sweep',
        'mnist-train': 'train the 784-100-10 classifier',
        'mnist-eval': 'clean and noisy test accuracy',
        'mnist-snr': 'output SNR over randomly drawn test digits',
    }
    for name in EXPERIMENTS:
        subparsers.add_parser(name, parents=[common], help=helps[name])
    return parser


def flag_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Dotted settings keys for the plain value flags."""
    return {
        'sim.seed': args.seed,
        'sim.k': args.k,
        'noise.da_u': args.da_u,
        'noise.da_c': args.da_c,
        'noise.dm_u': args.dm_u,
        'noise.dm_c': args.dm_c,
        'noise.layers': args.noise_layers,
        'runtime.out': args.out,
        'runtime.threads': args.threads,
        'runtime.log_level': args.log_level,
        'runtime.log_file': args.log_file,
        'runtime.json_logs': args.json_logs,
        'mnist.data_dir': args.data_dir,
        'mnist.model': args.model,
        'mnist.epochs': args.epochs,
        'mnist.presentations': args.presentations,
        'mnist.aggregate': args.aggregate,
        'mnist.count': args.count,
        'mnist.plan': args.plan,
    }


def apply_mitigation_flags(settings: SettingsManager, args: argparse.Namespace) -> None:
    """Translate --ghost/--pool/--plan and their layer flags into the [mitigation] section."""
    mitigation = dict(settings.get_section('mitigation'))
    try:
        if args.plan is not None and args.subcommand in NETWORK_SUBCOMMANDS:
            mitigation = MitigationPlan.named(args.plan, m=settings.get('mnist.pool_m')).to_dict()
        if args.ghost is not None:
            ghost = parse_ghost_flag(args.ghost)
            mitigation.pop('ghost', None)
            if ghost is not None:
                mitigation['ghost'] = ghost.to_dict()
        if args.pool is not None:
            mitigation['pool'] = parse_pool_flag(args.pool).to_dict()
    except MitigationError as exc:
        raise ConfigurationError(str(exc)) from exc

    if args.ghost_layers is not None and 'ghost' in mitigation:
        mitigation['ghost']['layers'] = args.ghost_layers
    if args.pool_layers is not None and 'pool' in mitigation:
        mitigation['pool']['layers'] = args.pool_layers
    settings.set('mitigation', mitigation)


def _report(subcommand: str, result: Dict[str, Any]) -> None:
    table = result.get('table')
    if subcommand == 'stats' and table is not None:
        print(table.to_string(index=False))
    elif subcommand == 'mnist-eval':
        summary = result['summary']
        print(f"accuracy: clean={summary['clean_accuracy']:.4f} noisy={summary['noisy_accuracy']:.4f}")
    print(json.dumps({'subcommand': subcommand, **result['summary'], 'artifacts': result['artifacts']},
                     default=str))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        Process exit code.
    """
    try:
        args = build_parser().parse_args(argv)
        settings = SettingsManager(args.config)
        settings.apply_overrides(flag_overrides(args))
        apply_mitigation_flags(settings, args)
        level = str(settings.get('runtime.log_level', 'INFO')).upper()
        if level not in LOG_LEVELS:
            raise ConfigurationError(f"runtime.log_level must be one of {', '.join(LOG_LEVELS)}")
        configure_logging(level, settings.get('runtime.log_file'), bool(settings.get('runtime.json_logs')))
        config = ExperimentConfig.from_settings(
            settings, require_network=args.subcommand in NETWORK_SUBCOMMANDS)
        result = EXPERIMENTS[args.subcommand](config, settings).run()
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoiseNetError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:
        logger.exception("Unexpected failure")
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    _report(args.subcommand, result)
    return EXIT_OK
