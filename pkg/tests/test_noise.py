"""
Tests for the noise model and the counter-based random streams.
"""

import unittest

import numpy as np
import pytest

from core.exceptions import NoiseSpecError
from noise.noise_model import (
    NoiseSpec,
    apply_layer_noise,
    layer_noise_covariance,
    layer_noise_variance,
    sample_noisy_output,
)
from noise.rng import TRIAL_BLOCK, NoiseTag, RngStream


class TestNoiseSpec(unittest.TestCase):
    """Test cases for NoiseSpec."""

    def test_rejects_negative_intensity(self):
        with self.assertRaises(NoiseSpecError):
            NoiseSpec(da_u=-1e-4)

    def test_rejects_non_finite_intensity(self):
        with self.assertRaises(NoiseSpecError):
            NoiseSpec(dm_c=float('inf'))

    def test_layer_mask(self):
        spec = NoiseSpec(da_u=1e-4, layers={1, 2})
        self.assertFalse(spec.enabled(0))
        self.assertTrue(spec.enabled(2))
        self.assertTrue(NoiseSpec(da_u=1e-4).enabled(7))
        self.assertEqual(spec.with_layers(None).layers, None)

    def test_dict_round_trip(self):
        spec = NoiseSpec(1e-4, 1e-3, 2e-4, 0.0, frozenset({0, 2}))
        self.assertEqual(spec.to_dict()['layers'], [0, 2])
        self.assertEqual(NoiseSpec.from_dict(spec.to_dict()), spec)


class TestRngStream(unittest.TestCase):
    """Test cases for RngStream."""

    def setUp(self):
        self.rng = RngStream(42)

    def test_same_coordinates_same_draws(self):
        first = self.rng.normals(1, NoiseTag.ADDITIVE_UNCORRELATED, np.arange(10), 3, 5)
        second = RngStream(42).normals(1, NoiseTag.ADDITIVE_UNCORRELATED, np.arange(10), 3, 5)
        np.testing.assert_array_equal(first, second)

    def test_draw_depends_only_on_trial_index(self):
        """Any split of trials reproduces the same rows, across block boundaries."""
        trials = np.arange(TRIAL_BLOCK - 5, TRIAL_BLOCK + 5)
        whole = self.rng.normals(0, NoiseTag.ADDITIVE_CORRELATED, trials, 0, 1)
        pieces = np.concatenate([
            self.rng.normals(0, NoiseTag.ADDITIVE_CORRELATED, trials[:3], 0, 1),
            self.rng.normals(0, NoiseTag.ADDITIVE_CORRELATED, trials[3:], 0, 1),
        ])
        np.testing.assert_array_equal(whole, pieces)
        shuffled = trials[::-1]
        np.testing.assert_array_equal(
            self.rng.normals(0, NoiseTag.ADDITIVE_CORRELATED, shuffled, 0, 1), whole[::-1])

    def test_distinct_coordinates_differ(self):
        base = self.rng.normals(0, NoiseTag.ADDITIVE_UNCORRELATED, np.arange(4), 0, 3)
        for other in (
            self.rng.normals(1, NoiseTag.ADDITIVE_UNCORRELATED, np.arange(4), 0, 3),
            self.rng.normals(0, NoiseTag.MULTIPLICATIVE_UNCORRELATED, np.arange(4), 0, 3),
            self.rng.normals(0, NoiseTag.ADDITIVE_UNCORRELATED, np.arange(4), 1, 3),
            RngStream(43).normals(0, NoiseTag.ADDITIVE_UNCORRELATED, np.arange(4), 0, 3),
        ):
            self.assertFalse(np.array_equal(base, other))

    def test_rejects_bad_seed_and_trials(self):
        with self.assertRaises(NoiseSpecError):
            RngStream(-1)
        with self.assertRaises(NoiseSpecError):
            self.rng.normals(0, 0, np.array([-1]), 0, 1)


class TestSampleNoisyOutput(unittest.TestCase):
    """Test cases for sample_noisy_output and apply_layer_noise."""

    def setUp(self):
        self.rng = RngStream(7)

    def test_noiseless_spec_returns_input(self):
        x = np.array([0.1, 0.5, 0.9])
        np.testing.assert_array_equal(sample_noisy_output(x, NoiseSpec(), self.rng, 0, 3), x)

    def test_disabled_layer_adds_nothing(self):
        x = np.array([0.2, 0.4])
        spec = NoiseSpec(da_u=1e-3, da_c=1e-3, layers={1})
        np.testing.assert_array_equal(apply_layer_noise(x, spec, self.rng, 0, np.arange(5)),
                                      np.tile(x, (5, 1)))

    def test_rejects_non_finite_output(self):
        with self.assertRaises(NoiseSpecError):
            sample_noisy_output(np.array([np.nan]), NoiseSpec(da_u=1e-4), self.rng, 0, 0)

    def test_single_trial_matches_batch_row(self):
        x = np.array([0.3, 0.6, 0.9])
        spec = NoiseSpec(1e-4, 1e-3, 1e-3, 1e-3)
        batch = apply_layer_noise(x, spec, self.rng, 2, np.arange(20), timestep=4)
        np.testing.assert_array_equal(sample_noisy_output(x, spec, self.rng, 2, 13, timestep=4), batch[13])

    def test_correlated_draw_is_shared_by_layer(self):
        x = np.zeros(4)
        y = apply_layer_noise(x, NoiseSpec(da_c=1e-3), self.rng, 0, np.arange(50))
        np.testing.assert_array_equal(y, np.repeat(y[:, :1], 4, axis=1))

    def test_additive_variance_moderate_trials(self):
        x = np.zeros(3)
        y = apply_layer_noise(x, NoiseSpec(da_u=1e-4, da_c=1e-3), self.rng, 0, np.arange(20000))
        np.testing.assert_allclose(y.var(axis=0, ddof=1), 2.2e-3, rtol=0.05)


@pytest.mark.slow
class TestNoiseMoments(unittest.TestCase):
    """Empirical moments of the noise model at 10^6 trials."""

    TRIALS = 1_000_000

    def setUp(self):
        self.rng = RngStream(2024)
        self.trials = np.arange(self.TRIALS)

    def test_additive_variance(self):
        y = apply_layer_noise(np.zeros(2), NoiseSpec(da_u=1e-4, da_c=1e-3), self.rng, 0, self.trials)
        np.testing.assert_allclose(y.var(axis=0, ddof=1), 2.2e-3, rtol=0.01)

    def test_multiplicative_variance(self):
        y = apply_layer_noise(np.ones(2), NoiseSpec(dm_u=1e-3, dm_c=1e-3), self.rng, 0, self.trials)
        np.testing.assert_allclose(y.var(axis=0, ddof=1), 4.004e-3, rtol=0.01)

    def test_mean_and_mixed_variance(self):
        x = np.array([0.2, 0.7, 1.5])
        spec = NoiseSpec(1e-4, 2e-4, 5e-4, 3e-4)
        y = apply_layer_noise(x, spec, self.rng, 1, self.trials, timestep=9)
        predicted = layer_noise_variance(x, np.zeros(3), spec)
        stderr = np.sqrt(predicted / self.TRIALS)
        self.assertTrue(np.all(np.abs(y.mean(axis=0) - x) < 4 * stderr))
        np.testing.assert_allclose(y.var(axis=0, ddof=1), predicted, rtol=0.02)

    def test_correlation_structure(self):
        correlated = apply_layer_noise(np.zeros(2), NoiseSpec(da_c=1e-3), self.rng, 0, self.trials)
        uncorrelated = apply_layer_noise(np.zeros(2), NoiseSpec(da_u=1e-3), self.rng, 0, self.trials)
        self.assertGreater(np.corrcoef(correlated.T)[0, 1], 0.99)
        self.assertLess(abs(np.corrcoef(uncorrelated.T)[0, 1]), 0.02)

    def test_covariance_matches_empirical(self):
        x = np.array([0.5, 1.0])
        spec = NoiseSpec(1e-4, 1e-3, 1e-3, 1e-3)
        y = apply_layer_noise(x, spec, self.rng, 0, self.trials)
        predicted = layer_noise_covariance(x, np.zeros((2, 2)), spec)
        np.testing.assert_allclose(np.cov(y.T), predicted, rtol=0.03)


class TestLayerNoiseVariance(unittest.TestCase):
    """Test cases for layer_noise_variance and layer_noise_covariance."""

    def test_pure_additive(self):
        self.assertAlmostEqual(float(layer_noise_variance(0.3, 0.0, NoiseSpec(da_u=1e-4))), 2e-4)

    def test_pure_multiplicative(self):
        self.assertAlmostEqual(float(layer_noise_variance(1.0, 0.0, NoiseSpec(dm_u=1e-3))), 2e-3)

    def test_noiseless_zero(self):
        self.assertEqual(float(layer_noise_variance(0.0, 0.0, NoiseSpec())), 0.0)

    def test_passthrough_of_input_variance(self):
        self.assertAlmostEqual(float(layer_noise_variance(0.5, 0.01, NoiseSpec(da_c=1e-4))), 0.0102)

    def test_rejects_negative_variance(self):
        with self.assertRaises(NoiseSpecError):
            layer_noise_variance(np.ones(2), np.array([0.1, -0.1]), NoiseSpec())

    def test_covariance_diagonal_equals_variance(self):
        rng = np.random.default_rng(0)
        mean = rng.uniform(size=4)
        var = rng.uniform(0.0, 0.01, size=4)
        spec = NoiseSpec(1e-4, 2e-4, 3e-4, 4e-4)
        cov = layer_noise_covariance(mean, np.diag(var), spec)
        np.testing.assert_allclose(np.diag(cov), layer_noise_variance(mean, var, spec), rtol=1e-12)

    def test_covariance_off_diagonal_correlated_terms(self):
        mean = np.array([1.0, 2.0])
        cov = layer_noise_covariance(mean, np.zeros((2, 2)), NoiseSpec(da_c=1e-3, dm_c=1e-3))
        self.assertAlmostEqual(cov[0, 1], 2e-3 + 2e-3 * 2.0)
        self.assertAlmostEqual(cov[0, 1], cov[1, 0])
