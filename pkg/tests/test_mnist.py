"""
Tests for IDX loading, the classifier trainer and noisy evaluation.

The fast suites run on small synthetic IDX files; the ``mnist`` suites
use the real distribution files when NOISENET_MNIST_DIR points at them.
"""

import gzip
import os
import shutil
import struct
import tempfile
import unittest

import numpy as np
import pytest

from core.exceptions import (
    ConfigurationError,
    IdxFormatError,
    SimulationError,
    TopologyError,
    TrainingDivergedError,
)
from core.network_io import save_network
from core.topology import forward_batch
from mitigation.ghost import GhostMode
from mitigation.plan import GhostConfig, MitigationPlan, PoolConfig
from mnist.evaluation import (
    AGGREGATE_MEAN,
    DEFAULT_MITIGATED_LAYERS,
    DEFAULT_NOISY_LAYERS,
    SNR_COLUMNS,
    evaluate_accuracy,
    output_snr_over_digits,
)
from mnist.idx_loader import (
    MNIST_IMAGE_MAGIC,
    MNIST_LABEL_MAGIC,
    Dataset,
    find_split_files,
    load_idx,
    load_mnist,
    read_idx_images,
    read_idx_labels,
)
from mnist.trainer import TrainConfig, load_model, save_model, train
from noise.noise_model import NoiseSpec
from sim.generators import uniform_fan_network
from tests import mnist_dir

SIDE = 4


def write_idx_images(path, images, magic=MNIST_IMAGE_MAGIC, compress=False):
    data = struct.pack('>4I', magic, images.shape[0], SIDE, SIDE) + images.astype(np.uint8).tobytes()
    with open(path, 'wb') as f:
        f.write(gzip.compress(data) if compress else data)


def write_idx_labels(path, labels, magic=MNIST_LABEL_MAGIC, compress=False):
    data = struct.pack('>2I', magic, labels.shape[0]) + labels.astype(np.uint8).tobytes()
    with open(path, 'wb') as f:
        f.write(gzip.compress(data) if compress else data)


def synthetic_digits(count, seed):
    """Raw 4x4 images whose brightest pixel is the label."""
    rng = np.random.default_rng(seed)
    labels = np.arange(count) % 10
    images = rng.integers(0, 40, size=(count, SIDE * SIDE))
    images[np.arange(count), labels] = 255
    return images, labels


def synthetic_dataset(count=200, seed=0, split='train'):
    images, labels = synthetic_digits(count, seed)
    return Dataset(images / 255.0, labels.astype(np.int64), split)


FAST_TRAINING = TrainConfig(epochs=15, batch_size=16, learning_rate=0.5, momentum=0.9, seed=3, hidden=12)


class TestIdxLoader(unittest.TestCase):
    """Test cases for the IDX reader."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.images, self.labels = synthetic_digits(20, seed=1)

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def path(self, name):
        return os.path.join(self.temp_dir, name)

    def test_round_trip_scales_pixels(self):
        write_idx_images(self.path('img'), self.images)
        write_idx_labels(self.path('lbl'), self.labels)
        data = load_idx(self.path('img'), self.path('lbl'), split='train')
        self.assertEqual(len(data), 20)
        self.assertEqual(data.n_features, 16)
        self.assertEqual(data.split, 'train')
        np.testing.assert_allclose(data.images, self.images / 255.0)
        np.testing.assert_array_equal(data.labels, self.labels)

    def test_gzip_files(self):
        write_idx_images(self.path('img.gz'), self.images, compress=True)
        write_idx_labels(self.path('lbl.gz'), self.labels, compress=True)
        np.testing.assert_array_equal(read_idx_images(self.path('img.gz')), self.images)
        np.testing.assert_array_equal(read_idx_labels(self.path('lbl.gz')), self.labels)

    def test_bad_magic(self):
        write_idx_images(self.path('img'), self.images, magic=MNIST_LABEL_MAGIC)
        with self.assertRaises(IdxFormatError) as ctx:
            read_idx_images(self.path('img'))
        self.assertIn("bad magic", str(ctx.exception))

    def test_truncated_payload(self):
        write_idx_images(self.path('img'), self.images)
        with open(self.path('img'), 'rb') as f:
            data = f.read()
        with open(self.path('img'), 'wb') as f:
            f.write(data[:-5])
        with self.assertRaises(IdxFormatError) as ctx:
            read_idx_images(self.path('img'))
        self.assertIn("truncated", str(ctx.exception))

    def test_truncated_header(self):
        with open(self.path('lbl'), 'wb') as f:
            f.write(struct.pack('>I', MNIST_LABEL_MAGIC))
        with self.assertRaises(IdxFormatError):
            read_idx_labels(self.path('lbl'))

    def test_label_out_of_range(self):
        write_idx_labels(self.path('lbl'), np.array([1, 12]))
        with self.assertRaises(IdxFormatError):
            read_idx_labels(self.path('lbl'))

    def test_count_mismatch(self):
        write_idx_images(self.path('img'), self.images)
        write_idx_labels(self.path('lbl'), self.labels[:10])
        with self.assertRaises(IdxFormatError) as ctx:
            load_idx(self.path('img'), self.path('lbl'))
        self.assertIn("count mismatch", str(ctx.exception))

    def test_find_split_files(self):
        write_idx_images(self.path('t10k-images-idx3-ubyte'), self.images)
        write_idx_labels(self.path('t10k-labels-idx1-ubyte.gz'), self.labels, compress=True)
        images_path, labels_path = find_split_files(self.temp_dir, 'test')
        self.assertTrue(labels_path.endswith('.gz'))
        self.assertEqual(len(load_mnist(self.temp_dir, 'test')), 20)
        with self.assertRaises(ConfigurationError):
            find_split_files(self.temp_dir, 'train')
        with self.assertRaises(ConfigurationError):
            find_split_files(self.temp_dir, 'validation')

    def test_subset(self):
        data = synthetic_dataset(30)
        part = data.subset(np.array([3, 5]))
        self.assertEqual(len(part), 2)
        np.testing.assert_array_equal(part.labels, data.labels[[3, 5]])


class TestTrainer(unittest.TestCase):
    """Test cases for the classifier trainer."""

    @classmethod
    def setUpClass(cls):
        cls.train_data = synthetic_dataset(200, seed=0)
        cls.test_data = synthetic_dataset(100, seed=1, split='test')
        cls.model = train(cls.train_data, FAST_TRAINING, cls.test_data)

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_architecture(self):
        net = self.model.network
        self.assertEqual(net.widths, [16, 12, 10])
        self.assertFalse(net.layers[1].activation.is_linear)
        self.assertEqual(net.layers[1].activation.gain, 1.0)
        self.assertEqual(net.layers[2].activation.offset, 0.0)

    def test_learns_synthetic_digits(self):
        self.assertGreater(self.model.metadata.test_accuracy, 0.9)
        history = self.model.metadata.loss_history
        self.assertEqual(len(history), FAST_TRAINING.epochs)
        self.assertLessEqual(np.mean(np.diff(history[:5])), 0.0)
        self.assertLess(history[-1], history[0])

    def test_deterministic_given_seed(self):
        again = train(self.train_data, FAST_TRAINING)
        for a, b in zip(self.model.network.weights, again.network.weights):
            np.testing.assert_array_equal(a, b)

    def test_invalid_config(self):
        with self.assertRaises(ConfigurationError):
            train(self.train_data, TrainConfig(epochs=0, momentum=1.5))

    def test_divergence_reports_diagnostics(self):
        broken = Dataset(np.full((20, 16), np.nan), np.zeros(20, dtype=np.int64), 'train')
        with self.assertRaises(TrainingDivergedError) as ctx:
            train(broken, TrainConfig(epochs=2, batch_size=10, hidden=4))
        self.assertEqual(ctx.exception.diagnostics['epoch'], 1)

    def test_rejects_other_splits(self):
        with self.assertRaises(ConfigurationError):
            train(self.test_data, FAST_TRAINING)

    def test_save_and_load(self):
        path = os.path.join(self.temp_dir, 'model.json')
        save_model(self.model, path)
        loaded = load_model(path)
        self.assertEqual(loaded.metadata.seed, FAST_TRAINING.seed)
        self.assertEqual(loaded.metadata.test_accuracy, self.model.metadata.test_accuracy)
        np.testing.assert_array_equal(loaded.predict(self.test_data.images),
                                      self.model.predict(self.test_data.images))

    def test_load_rejects_other_networks(self):
        path = os.path.join(self.temp_dir, 'fan.json')
        save_network(uniform_fan_network(5), path)
        with self.assertRaises(TopologyError):
            load_model(path)


class TestNoisyEvaluation(unittest.TestCase):
    """Test cases for evaluate_accuracy and output_snr_over_digits."""

    @classmethod
    def setUpClass(cls):
        cls.model = train(synthetic_dataset(200, seed=0), FAST_TRAINING)
        cls.data = synthetic_dataset(100, seed=1, split='test')
        cls.spec = NoiseSpec(da_u=1e-4, da_c=1e-3, layers=DEFAULT_NOISY_LAYERS)
        cls.plan = MitigationPlan.named('combined', layers=DEFAULT_MITIGATED_LAYERS, m=4)

    def test_noiseless_equals_clean_accuracy(self):
        clean = self.model.accuracy(self.data)
        self.assertEqual(evaluate_accuracy(self.model, self.data, NoiseSpec()), clean)
        self.assertEqual(evaluate_accuracy(self.model, self.data, NoiseSpec(), plan=self.plan,
                                           presentations=3), clean)

    def test_seeded_and_thread_independent(self):
        first = evaluate_accuracy(self.model, self.data, self.spec, presentations=2, seed=4)
        second = evaluate_accuracy(self.model, self.data, self.spec, presentations=2, seed=4, n_jobs=2)
        self.assertEqual(first, second)

    def test_mean_aggregate(self):
        accuracy = evaluate_accuracy(self.model, self.data, self.spec, presentations=5,
                                     aggregate=AGGREGATE_MEAN)
        self.assertGreaterEqual(accuracy, 0.0)
        self.assertLessEqual(accuracy, 1.0)

    def test_invalid_arguments(self):
        with self.assertRaises(SimulationError):
            evaluate_accuracy(self.model, self.data, self.spec, presentations=0)
        with self.assertRaises(SimulationError):
            evaluate_accuracy(self.model, self.data, self.spec, aggregate='vote')
        with self.assertRaises(SimulationError):
            output_snr_over_digits(self.model, self.data, self.spec, count=101)
        wrong = Dataset(np.zeros((3, 9)), np.zeros(3, dtype=np.int64))
        with self.assertRaises(TopologyError):
            evaluate_accuracy(self.model, wrong, self.spec)

    def test_snr_table(self):
        table = output_snr_over_digits(self.model, self.data, self.spec, count=10, k=50, seed=2)
        self.assertEqual(list(table.columns), SNR_COLUMNS)
        self.assertEqual(len(table), 10)
        self.assertEqual(table['dataset_index'].nunique(), 10)
        self.assertTrue(table['noise_free_value'].is_monotonic_increasing)
        self.assertTrue((table['k'] == 50).all())

    def test_snr_unbounded_without_noise(self):
        table = output_snr_over_digits(self.model, self.data, NoiseSpec(), count=5, k=10)
        self.assertTrue(np.isinf(table['snr']).all())
        np.testing.assert_allclose(table['emp_mean'], table['noise_free_value'], rtol=1e-12)

    def test_mitigation_raises_snr(self):
        base = output_snr_over_digits(self.model, self.data, self.spec, count=10, k=200, seed=5)
        mitigated = output_snr_over_digits(self.model, self.data, self.spec, plan=self.plan,
                                           count=10, k=200, seed=5)
        self.assertGreater(mitigated['snr'].max(), 1.5 * base['snr'].max())

    def test_snr_rows_describe_the_drawn_digits(self):
        table = output_snr_over_digits(self.model, self.data, self.spec, count=8, k=20, seed=3)
        np.testing.assert_array_equal(table['label'], self.data.labels[table['dataset_index']])
        clean = self.model.network
        for _, row in table.iterrows():
            expected = forward_batch(clean, self.data.images[[int(row['dataset_index'])]])[0]
            self.assertEqual(row['output_neuron'], int(np.argmax(expected)))

    def test_final_layer_ghost_captures_most_of_the_gain(self):
        base = output_snr_over_digits(self.model, self.data, self.spec, count=10, k=200, seed=5)
        final_only = MitigationPlan(ghost=GhostConfig(GhostMode.WEIGHTED, -1.0, {2}))
        every_layer = MitigationPlan(ghost=GhostConfig(GhostMode.WEIGHTED, -1.0, {1, 2}))
        final = output_snr_over_digits(self.model, self.data, self.spec, plan=final_only,
                                       count=10, k=200, seed=5)
        both = output_snr_over_digits(self.model, self.data, self.spec, plan=every_layer,
                                      count=10, k=200, seed=5)
        gain_all = both['snr'].max() - base['snr'].max()
        self.assertGreater(gain_all, 0.0)
        share = (final['snr'].max() - base['snr'].max()) / gain_all
        self.assertGreaterEqual(share, 0.6)

    def test_pooling_scales_snr_by_root_m_under_uncorrelated_noise(self):
        spec = NoiseSpec(da_u=1e-4, dm_u=1e-3, layers=DEFAULT_NOISY_LAYERS)
        base = output_snr_over_digits(self.model, self.data, spec, count=10, k=400, seed=6)
        for m in (2, 4):
            plan = MitigationPlan(pool=PoolConfig(m, set(DEFAULT_MITIGATED_LAYERS)))
            pooled = output_snr_over_digits(self.model, self.data, spec, plan=plan,
                                            count=10, k=400, seed=6)
            ratio = pooled.set_index('dataset_index')['snr'] / base.set_index('dataset_index')['snr']
            self.assertAlmostEqual(float(np.median(ratio)) / np.sqrt(m), 1.0, delta=0.15, msg=f"m={m}")


@pytest.mark.mnist
@pytest.mark.slow
@unittest.skipIf(mnist_dir() is None, "MNIST files not available")
class TestMnistAcceptance(unittest.TestCase):
    """Trained 784-100-10 network on the real MNIST files."""

    SEEDS = (0, 1, 2)

    @classmethod
    def setUpClass(cls):
        cls.train_data = load_mnist(mnist_dir(), 'train')
        cls.test_data = load_mnist(mnist_dir(), 'test')
        cls.model = train(cls.train_data, TrainConfig(), cls.test_data)
        cls.clean = cls.model.metadata.test_accuracy
        cls.spec = NoiseSpec(da_u=1e-4, da_c=1e-3, layers=DEFAULT_NOISY_LAYERS)

    def mean_accuracy(self, plan):
        return float(np.mean([evaluate_accuracy(self.model, self.test_data, self.spec, plan=plan,
                                                seed=seed, n_jobs=-1) for seed in self.SEEDS]))

    def test_clean_accuracy(self):
        self.assertGreaterEqual(self.clean, 0.965)

    def test_noise_drop_and_recovery(self):
        noisy = self.mean_accuracy(None)
        adaptive = self.mean_accuracy(MitigationPlan.named('combined', DEFAULT_MITIGATED_LAYERS, m=4))
        fixed = self.mean_accuracy(MitigationPlan.named('combined-fixed', DEFAULT_MITIGATED_LAYERS, m=4))
        self.assertGreaterEqual(self.clean - noisy, 0.03)
        self.assertLessEqual(self.clean - noisy, 0.07)
        self.assertLessEqual(self.clean - adaptive, 0.007)
        self.assertGreaterEqual(self.clean, adaptive)
        self.assertGreaterEqual(adaptive, fixed)
        self.assertGreaterEqual(fixed, noisy)

    def test_output_snr_ratio(self):
        base = output_snr_over_digits(self.model, self.test_data, self.spec, count=500, k=300,
                                      seed=0, n_jobs=-1)
        plan = MitigationPlan.named('combined', DEFAULT_MITIGATED_LAYERS, m=4)
        mitigated = output_snr_over_digits(self.model, self.test_data, self.spec, plan=plan,
                                           count=500, k=300, seed=0, n_jobs=-1)
        ratio = mitigated['snr'].max() / base['snr'].max()
        self.assertGreaterEqual(ratio, 3.0)
        self.assertLessEqual(ratio, 5.0)

    def test_pooling_snr_ratio_under_uncorrelated_noise(self):
        spec = NoiseSpec(da_u=1e-4, dm_u=1e-3, layers=DEFAULT_NOISY_LAYERS)
        base = output_snr_over_digits(self.model, self.test_data, spec, count=100, k=300,
                                      seed=1, n_jobs=-1)
        for m in (2, 4):
            plan = MitigationPlan(pool=PoolConfig(m, set(DEFAULT_MITIGATED_LAYERS)))
            pooled = output_snr_over_digits(self.model, self.test_data, spec, plan=plan, count=100,
                                            k=300, seed=1, n_jobs=-1)
            ratio = pooled.set_index('dataset_index')['snr'] / base.set_index('dataset_index')['snr']
            self.assertAlmostEqual(float(np.median(ratio)) / np.sqrt(m), 1.0, delta=0.15, msg=f"m={m}")
