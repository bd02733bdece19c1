"""
MNIST Experiments

Runners for ``mnist-train``, ``mnist-eval`` and ``mnist-snr``. Unless the
noise section names its layers, the MNIST noise mask is the configured
``mnist.noisy_layers`` (hidden and output by default). An explicit
[mitigation] section takes precedence over the named ``mnist.plan``.
"""

import logging
import os
from typing import Any, Dict

import pandas as pd

from core.exceptions import ConfigurationError
from experiments.base_experiment import BaseExperiment
from mitigation.plan import MitigationPlan
from mnist.evaluation import evaluate_accuracy, output_snr_over_digits
from mnist.idx_loader import load_mnist
from mnist.trainer import TrainedModel, load_model, save_model, train
from noise.noise_model import NoiseSpec

logger = logging.getLogger(__name__)

HISTORY_CSV = 'training_history.csv'
ACCURACY_CSV = 'accuracy.csv'
SNR_CSV = 'mnist_snr.csv'


class MnistExperiment(BaseExperiment):
    """Shared data, model, noise and plan resolution."""

    def noise_spec(self) -> NoiseSpec:
        noise = self.config.noise
        if noise.layers is None:
            return noise.with_layers(self.config.mnist.noisy_layers)
        return noise

    def plan(self) -> MitigationPlan:
        if not self.config.plan.is_empty:
            return self.config.plan
        mnist = self.config.mnist
        return MitigationPlan.named(mnist.plan, mnist.mitigated_layers, mnist.pool_m)

    def load_split(self, split: str):
        data_dir = self.config.mnist.data_dir
        if not os.path.isdir(data_dir):
            raise ConfigurationError(f"MNIST data directory not found: {data_dir}")
        return load_mnist(data_dir, split)

    def load_model(self) -> TrainedModel:
        path = self.config.mnist.model
        if not os.path.exists(path):
            raise ConfigurationError(f"model file not found: {path} (run mnist-train first)")
        return load_model(path)


class MnistTrainExperiment(MnistExperiment):
    """Train the 784-100-10 classifier and store it."""

    def __init__(self, config, settings=None):
        super().__init__('mnist-train', config, settings)

    def process(self) -> Dict[str, Any]:
        train_data = self.load_split('train')
        test_data = self.load_split('test')
        self.log_activity("Training", train_config=self.config.train.to_dict(), samples=len(train_data))
        model = train(train_data, self.config.train, test_data)
        save_model(model, self.config.mnist.model)

        history = pd.DataFrame({
            'epoch': range(1, len(model.metadata.loss_history) + 1),
            'loss': model.metadata.loss_history,
        })
        path = self.write_csv(history, HISTORY_CSV)
        return {
            'artifacts': [path, self.config.mnist.model],
            'summary': {
                'test_accuracy': model.metadata.test_accuracy,
                'final_loss': model.metadata.loss_history[-1],
                'training_seconds': round(model.metadata.training_seconds, 1),
            },
        }


class MnistEvalExperiment(MnistExperiment):
    """Clean and noisy test accuracy under the configured plan."""

    def __init__(self, config, settings=None):
        super().__init__('mnist-eval', config, settings)

    def process(self) -> Dict[str, Any]:
        model = self.load_model()
        test_data = self.load_split('test')
        spec, plan, mnist = self.noise_spec(), self.plan(), self.config.mnist
        seed = self.config.sim.seed

        clean = model.accuracy(test_data)
        noisy = evaluate_accuracy(model, test_data, spec, plan, presentations=mnist.presentations,
                                  seed=seed, aggregate=mnist.aggregate, n_jobs=self.n_jobs)
        table = pd.DataFrame([{
            'plan': mnist.plan if self.config.plan.is_empty else 'custom',
            'presentations': mnist.presentations,
            'aggregate': mnist.aggregate,
            'seed': seed,
            'clean_accuracy': clean,
            'noisy_accuracy': noisy,
        }])
        path = self.write_csv(table, ACCURACY_CSV)
        return {
            'artifacts': [path],
            'summary': {'clean_accuracy': clean, 'noisy_accuracy': noisy, 'plan': plan.to_dict()},
            'table': table,
        }


class MnistSnrExperiment(MnistExperiment):
    """Output SNR of the winning neuron over randomly drawn test digits."""

    def __init__(self, config, settings=None):
        super().__init__('mnist-snr', config, settings)

    def process(self) -> Dict[str, Any]:
        model = self.load_model()
        test_data = self.load_split('test')
        table = output_snr_over_digits(model, test_data, self.noise_spec(), self.plan(),
                                       count=self.config.mnist.count, k=self.config.sim.k,
                                       seed=self.config.sim.seed, n_jobs=self.n_jobs)
        path = self.write_csv(table, SNR_CSV)
        return {
            'artifacts': [path],
            'summary': {'digits': len(table), 'max_snr': float(table['snr'].max())},
            'table': table,
        }
