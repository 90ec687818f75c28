import numpy as np
import pytest

from em_lab.errors import ConfigError
from em_lab.models import (Dataset, GaussianNull, GeneralMixture, RegressionModel,
                           TwoMixture, derive_stream, sample_mixture,
                           sample_regression, stream_key)


class TestValidation:
    def test_sigma_must_be_positive(self):
        with pytest.raises(ConfigError):
            GaussianNull(sigma=0.0)
        with pytest.raises(ConfigError):
            TwoMixture(theta_star=[1.0], pi=0.5, sigma=-1.0)

    def test_weights_must_be_simplex(self):
        with pytest.raises(ConfigError):
            GeneralMixture(weights=[0.5, 0.6], locations=[[0.0], [1.0]])

    def test_locations_share_dimension(self):
        m = GeneralMixture(weights=[0.5, 0.5], locations=[[0.0, 1.0], [1.0, 2.0]])
        assert m.d == 2

    def test_empty_dataset_rejected(self):
        with pytest.raises(ConfigError, match="empty sample"):
            Dataset(points=np.zeros((0, 1)))

    def test_empty_draws_rejected(self):
        with pytest.raises(ConfigError, match="empty sample"):
            sample_mixture(GaussianNull(), 0, derive_stream(0, 0))
        with pytest.raises(ConfigError, match="empty sample"):
            sample_regression(RegressionModel(theta_star=[0.0]), 0, derive_stream(0, 0))


class TestSamplerMoments:
    """CLT bands at n = 1e6 (three standard errors, as stated)."""

    N = 1_000_000

    def test_gaussian_null_mean_and_variance(self):
        data = sample_mixture(GaussianNull(1.0, 1), self.N, derive_stream(1, 0))
        x = data.points[:, 0]
        assert -0.004 <= x.mean() <= 0.004
        assert 0.99 <= x.var() <= 1.01

    def test_two_mixture_second_moment(self):
        model = TwoMixture(theta_star=[5.0], pi=0.5, sigma=1.0)
        data = sample_mixture(model, self.N, derive_stream(2, 0))
        second = float(np.mean(data.points[:, 0] ** 2))
        assert abs(second - 26.0) <= 0.2  # theta*^2 + sigma^2

    def test_two_mixture_unbalanced_mean(self):
        model = TwoMixture(theta_star=[2.0], pi=0.3, sigma=1.0)
        data = sample_mixture(model, self.N, derive_stream(3, 0))
        # E X = (2 pi - 1) theta* = -0.8; sd of the mean ~ sqrt(1+4·0.84)/1000
        assert abs(float(data.points.mean()) + 0.8) <= 3 * 2.1 / 1000

    def test_general_mixture_mean(self):
        model = GeneralMixture(weights=[0.2, 0.5, 0.3],
                               locations=[[-1.0], [0.0], [2.0]], sigma=1.0)
        data = sample_mixture(model, self.N, derive_stream(4, 0))
        expected = 0.2 * -1.0 + 0.3 * 2.0
        assert abs(float(data.points.mean()) - expected) <= 0.005

    def test_regression_null_correlation(self):
        model = RegressionModel(theta_star=[0.0], sigma=1.0)
        data = sample_regression(model, self.N, derive_stream(5, 0))
        corr = np.corrcoef(data.points[:, 0], data.responses)[0, 1]
        assert -0.004 <= corr <= 0.004

    def test_regression_cross_moment(self):
        model = RegressionModel(theta_star=[0.7], sigma=1.0)
        data = sample_regression(model, self.N, derive_stream(6, 0))
        xy = float(np.mean(data.points[:, 0] * data.responses))
        assert abs(xy - 0.7) <= 0.01


class TestStreams:
    def test_identical_inputs_identical_streams(self):
        a = derive_stream(42, 0).standard_normal(1000)
        b = derive_stream(42, 0).standard_normal(1000)
        assert np.array_equal(a, b)

    def test_trial_indices_decorrelate(self):
        # first draws across 1e4 trial indices must all differ
        firsts = np.array([derive_stream(42, t).standard_normal() for t in range(10_000)])
        assert len(np.unique(firsts)) == len(firsts)
        assert derive_stream(42, 0).standard_normal() != derive_stream(42, 1).standard_normal()

    def test_master_seeds_decorrelate(self):
        firsts = np.array([derive_stream(s, 0).standard_normal() for s in range(10_000)])
        assert len(np.unique(firsts)) == len(firsts)
        assert derive_stream(42, 0).standard_normal() != derive_stream(43, 0).standard_normal()

    def test_stream_key_mixes_all_parts(self):
        keys = {stream_key(a, b, c) for a in range(7) for b in range(7) for c in range(7)}
        assert len(keys) == 7**3

    def test_sampling_is_pure_in_the_stream(self):
        model = TwoMixture(theta_star=[1.0, -1.0], pi=0.25, sigma=2.0)
        one = sample_mixture(model, 100, derive_stream(9, 3)).points
        two = sample_mixture(model, 100, derive_stream(9, 3)).points
        assert np.array_equal(one, two)
