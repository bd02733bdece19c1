"""
Network Experiments

Runners for the subcommands that work on a configured network:
``stats`` (per-layer connection statistics) and ``snr-sweep``
(empirical and analytic SNR over a set of inputs).
"""

import logging
from typing import Any, Dict

import numpy as np

from analytics.matrix_stats import network_stats
from experiments.base_experiment import BaseExperiment
from sim.sweep import snr_sweep, sweep_inputs, write_sweep_csv

logger = logging.getLogger(__name__)

STATS_CSV = 'stats.csv'
SWEEP_CSV = 'snr_sweep.csv'


class StatsExperiment(BaseExperiment):
    """mu^2, eta, I mu^2, I eta and the dominance verdict per weight matrix."""

    def __init__(self, config, settings=None):
        super().__init__('stats', config, settings)

    def process(self) -> Dict[str, Any]:
        network = self.config.build_network()
        table = network_stats(network)
        path = self.write_csv(table, STATS_CSV)
        return {
            'artifacts': [path],
            'summary': {'layers': len(table), 'widths': network.widths},
            'table': table,
        }


class SnrSweepExperiment(BaseExperiment):
    """SNR versus noise-free output over a sweep of inputs."""

    def __init__(self, config, settings=None):
        super().__init__('snr-sweep', config, settings)

    def process(self) -> Dict[str, Any]:
        network = self.config.build_network()
        sim = self.config.sim
        if sim.inputs is not None:
            inputs = np.asarray(sim.inputs, dtype=np.float64).reshape(-1, network.input_dim)
        else:
            inputs = sweep_inputs(sim.n_inputs, sim.seed, network.input_dim)

        self.log_activity("Starting SNR sweep", inputs=inputs.shape[0], k=sim.k,
                          noise=self.config.noise.to_dict(), plan=self.config.plan.to_dict())
        table = snr_sweep(network, inputs, self.config.noise, self.config.plan, k=sim.k,
                          seed=sim.seed, n_jobs=self.n_jobs, analytic=sim.analytic)
        path = write_sweep_csv(table, self.output_path(SWEEP_CSV))
        finite = table['snr'][np.isfinite(table['snr'])]
        return {
            'artifacts': [path],
            'summary': {
                'rows': len(table),
                'max_snr': float(finite.max()) if len(finite) else None,
                'mean_snr': float(finite.mean()) if len(finite) else None,
            },
            'table': table,
        }
