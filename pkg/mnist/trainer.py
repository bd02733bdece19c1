"""
MNIST Trainer

From-scratch training of the 784-100-10 classifier: standard sigmoid in
the hidden and output layers, cross-entropy over the independent sigmoid
outputs with one-hot targets, minibatch SGD with momentum. Training is
deterministic given the seed (Glorot-uniform initialisation and epoch
shuffling both come from one numpy Generator).

Models are stored as network description files whose metadata block holds
the training record.
"""

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from sklearn.metrics import accuracy_score

from core.activations import Activation
from core.exceptions import ConfigurationError, TopologyError, TrainingDivergedError
from core.network_io import load_network, save_network
from core.topology import LayerSpec, NetworkTopology, forward_batch
from mnist.idx_loader import Dataset

logger = logging.getLogger(__name__)

N_CLASSES = 10


@dataclass
class TrainConfig:
    """Minibatch SGD hyperparameters."""
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 0.1
    momentum: float = 0.9
    seed: int = 0
    hidden: int = 100

    def validate(self) -> List[str]:
        errors = []
        for name in ('epochs', 'batch_size', 'hidden'):
            if getattr(self, name) < 1:
                errors.append(f"{name} must be positive")
        if self.learning_rate <= 0.0:
            errors.append("learning_rate must be positive")
        if not 0.0 <= self.momentum < 1.0:
            errors.append("momentum must be in [0, 1)")
        if self.seed < 0:
            errors.append("seed must be non-negative")
        return errors

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class TrainingMetadata:
    """Training record stored with a model."""
    epochs: int = 0
    batch_size: int = 0
    learning_rate: float = 0.0
    momentum: float = 0.0
    seed: int = 0
    test_accuracy: Optional[float] = None
    loss_history: List[float] = field(default_factory=list)
    training_seconds: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TrainingMetadata':
        known = {name: data[name] for name in cls.__dataclass_fields__ if name in data}
        return cls(**known)


@dataclass
class TrainedModel:
    """Trained network plus its training record."""
    network: NetworkTopology
    metadata: TrainingMetadata

    def predict(self, images: np.ndarray) -> np.ndarray:
        """Noise-free class predictions (argmax of the outputs)."""
        return np.argmax(forward_batch(self.network, images), axis=1)

    def accuracy(self, data: Dataset) -> float:
        return float(accuracy_score(data.labels, self.predict(data.images)))


def _glorot_uniform(rng: np.random.Generator, fan_out: int, fan_in: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_out, fan_in))


class NetworkTrainer:
    """
    Trainer for the single-hidden-layer sigmoid classifier.

    Holds the parameters and their momentum buffers while training; the
    result is returned as an immutable NetworkTopology.
    """

    def __init__(self, config: TrainConfig):
        errors = config.validate()
        if errors:
            raise ConfigurationError("Invalid training configuration: " + "; ".join(errors))
        self.config = config
        self.activation = Activation.standard_sigmoid()
        self.rng = np.random.default_rng(config.seed)
        self.params: List[np.ndarray] = []
        self.velocity: List[np.ndarray] = []

    def _initialise(self, n_features: int) -> None:
        hidden = self.config.hidden
        self.params = [
            _glorot_uniform(self.rng, hidden, n_features), np.zeros(hidden),
            _glorot_uniform(self.rng, N_CLASSES, hidden), np.zeros(N_CLASSES),
        ]
        self.velocity = [np.zeros_like(p) for p in self.params]

    def _step(self, x: np.ndarray, targets: np.ndarray) -> float:
        """One SGD step on a minibatch; returns the mean cross-entropy."""
        w1, b1, w2, b2 = self.params
        h = self.activation(x @ w1.T + b1)
        z = h @ w2.T + b2
        o = self.activation(z)
        loss = float(np.mean(np.sum(np.logaddexp(0.0, z) - targets * z, axis=1)))

        delta_out = (o - targets) / x.shape[0]
        delta_hidden = (delta_out @ w2) * h * (1.0 - h)
        grads = [delta_hidden.T @ x, delta_hidden.sum(axis=0), delta_out.T @ h, delta_out.sum(axis=0)]

        for param, velocity, grad in zip(self.params, self.velocity, grads):
            velocity *= self.config.momentum
            velocity -= self.config.learning_rate * grad
            param += velocity
        return loss

    def network(self, n_features: int) -> NetworkTopology:
        w1, b1, w2, b2 = self.params
        layers = (
            LayerSpec(n_features),
            LayerSpec(self.config.hidden, self.activation, b1),
            LayerSpec(N_CLASSES, self.activation, b2),
        )
        return NetworkTopology(layers, (w1, w2))

    def train(self, data: Dataset, test_data: Optional[Dataset] = None) -> TrainedModel:
        """
        Train on ``data`` and record the clean accuracy on ``test_data``.

        Raises:
            TrainingDivergedError: the loss became non-finite
            ConfigurationError: ``data`` is not the train split
        """
        if data.split != 'train':
            raise ConfigurationError(f"training needs the train split, got {data.split!r}")
        cfg = self.config
        n_features = data.n_features
        self._initialise(n_features)
        targets = np.eye(N_CLASSES)[data.labels]
        history: List[float] = []
        start = time.time()

        for epoch in range(cfg.epochs):
            order = self.rng.permutation(len(data))
            losses = []
            for begin in range(0, len(data), cfg.batch_size):
                batch = order[begin:begin + cfg.batch_size]
                loss = self._step(data.images[batch], targets[batch])
                if not np.isfinite(loss):
                    raise TrainingDivergedError(
                        f"loss became non-finite in epoch {epoch + 1}",
                        diagnostics={'epoch': epoch + 1, 'batch_start': begin,
                                     'loss_history': history, 'config': cfg.to_dict()})
                losses.append(loss * len(batch))
            history.append(float(np.sum(losses) / len(data)))
            logger.info(f"epoch {epoch + 1}/{cfg.epochs}: loss {history[-1]:.5f}")

        model = TrainedModel(
            network=self.network(n_features),
            metadata=TrainingMetadata(cfg.epochs, cfg.batch_size, cfg.learning_rate, cfg.momentum,
                                      cfg.seed, loss_history=history,
                                      training_seconds=time.time() - start),
        )
        if test_data is not None:
            model.metadata.test_accuracy = model.accuracy(test_data)
            logger.info(f"Clean test accuracy: {model.metadata.test_accuracy:.4f}")
        return model


def train(data: Dataset, cfg: TrainConfig, test_data: Optional[Dataset] = None) -> TrainedModel:
    """Train a classifier; see NetworkTrainer.train."""
    return NetworkTrainer(cfg).train(data, test_data)


def save_model(model: TrainedModel, path: str) -> None:
    save_network(model.network, path, metadata=model.metadata.to_dict())


def load_model(path: str) -> TrainedModel:
    network, metadata = load_network(path)
    if network.widths[-1] != N_CLASSES or network.depth != 3:
        raise TopologyError(f"{path} is not a single-hidden-layer classifier: widths {network.widths}")
    return TrainedModel(network, TrainingMetadata.from_dict(metadata or {}))

