import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from em_lab.em_sample import (EmRunConfig, ParamState, run_em,
                              sample_em_general_step, sample_em_regression_step,
                              sample_em_symmetric_step,
                              sample_em_unknown_weight_step)
from em_lab.errors import ConfigError, NumericError
from em_lab.models import (Dataset, GaussianNull, GeneralKFit, RegressionFit,
                           SymmetricTwoFit, UnknownWeightFit, derive_stream,
                           sample_mixture)


def _bisect(f, lo, hi, tol=1e-13):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestSymmetricStep:
    def test_zero_gives_scaled_mean(self, rng):
        x = rng.standard_normal((50, 2))
        data = Dataset(points=x)
        for pi in (0.2, 0.5, 0.8):
            out = sample_em_symmetric_step(np.zeros(2), pi, data, 1.0)
            assert np.allclose(out, (2 * pi - 1) * x.mean(axis=0), atol=1e-15)
        balanced = sample_em_symmetric_step(np.zeros(2), 0.5, data, 1.0)
        assert np.array_equal(balanced, np.zeros(2))

    def test_two_point_symmetric_data(self):
        data = Dataset(points=np.array([[1.0], [-1.0]]))
        out = sample_em_symmetric_step(np.array([1.0]), 0.5, data, 1.0)
        assert float(out[0]) == pytest.approx(math.tanh(1.0), abs=1e-15)

    def test_fixed_point_of_two_point_set(self):
        # the positive root of theta = 2 tanh(2 theta), from a bisection oracle
        root = _bisect(lambda t: 2 * math.tanh(2 * t) - t, 0.5, 3.0)
        assert root == pytest.approx(1.9986, abs=5e-4)
        data = Dataset(points=np.array([[2.0], [-2.0]]))
        out = sample_em_symmetric_step(np.array([root]), 0.5, data, 1.0)
        assert float(out[0]) == pytest.approx(root, abs=1e-12)

    def test_empty_and_mismatched_data(self):
        with pytest.raises(ConfigError):
            sample_em_symmetric_step(np.array([1.0, 0.0]), 0.5,
                                     Dataset(points=np.zeros((3, 1))), 1.0)


class TestUnknownWeightStep:
    def test_zero_location(self, rng):
        x = rng.standard_normal((40, 1))
        data = Dataset(points=x)
        pi_new, theta_new = sample_em_unknown_weight_step(np.zeros(1), 0.3, data)
        assert pi_new == pytest.approx(0.3, abs=1e-15)
        assert np.allclose(theta_new, (2 * 0.3 - 1) * x.mean(axis=0), atol=1e-15)

    def test_single_point_average_is_a_weight(self, rng):
        data = Dataset(points=np.array([[0.7]]))
        pi_new, _ = sample_em_unknown_weight_step(np.array([2.0]), 0.4, data)
        assert 0 < pi_new < 1

    def test_symmetric_pair_balanced(self):
        data = Dataset(points=np.array([[1.3], [-1.3]]))
        pi_new, theta_new = sample_em_unknown_weight_step(np.zeros(1), 0.5, data)
        assert pi_new == pytest.approx(0.5, abs=1e-15)
        assert float(theta_new[0]) == 0.0


class TestRegressionStep:
    def test_zero_is_fixed(self, rng):
        x = rng.standard_normal((30, 2))
        y = rng.standard_normal(30)
        out = sample_em_regression_step(np.zeros(2), Dataset(points=x, responses=y))
        assert np.array_equal(out, np.zeros(2))

    def test_hand_computed_example(self):
        # x = (1, 1), y = (2, -2): the average of tanh(theta x y) x y over
        # the mean square of x gives 2 tanh(2) at theta = 1
        data = Dataset(points=np.array([[1.0], [1.0]]), responses=np.array([2.0, -2.0]))
        out = sample_em_regression_step(np.array([1.0]), data)
        assert float(out[0]) == pytest.approx(2 * math.tanh(2.0), abs=1e-14)
        assert float(out[0]) == pytest.approx(1.928, abs=1e-3)

    def test_degenerate_design_rejected(self):
        data = Dataset(points=np.zeros((5, 1)), responses=np.ones(5))
        with pytest.raises(NumericError, match="degenerate design"):
            sample_em_regression_step(np.array([1.0]), data)


class TestGeneralStep:
    def test_mirrored_pair_reproduces_symmetric_step(self, rng):
        x = rng.standard_normal((200, 3))
        data = Dataset(points=x)
        theta = rng.standard_normal(3)
        for pi in (0.3, 0.5):
            direct = sample_em_symmetric_step(theta, pi, data, 1.2)
            _, loc = sample_em_general_step(
                np.array([pi, 1 - pi]), np.vstack([theta, -theta]), data, 1.2,
                weights_free=False, tie_pairs=((0, 1),))
            assert np.allclose(loc[0], direct, atol=1e-12)
            assert np.array_equal(loc[1], -loc[0])

    def test_constant_data_collapses_locations(self):
        data = Dataset(points=np.full((20, 1), 3.0))
        _, loc = sample_em_general_step(np.array([0.4, 0.6]),
                                        np.array([[1.0], [-2.0]]), data, 1.0,
                                        weights_free=False)
        assert np.allclose(loc, 3.0, atol=1e-12)

    def test_weighted_sign_relation_on_null_data(self):
        # fitted free locations under a fixed unbalanced weight satisfy
        # pi theta_1 + (1 - pi) theta_2 ~ 0 (the sample mean is ~ 0)
        stream = derive_stream(1234, 0)
        data = sample_mixture(GaussianNull(1.0, 1), 10_000, stream)
        fit = GeneralKFit(k=2, weights=np.array([0.3, 0.7]), sigma=1.0, d=1)
        init = ParamState(weights=np.array([0.3, 0.7]),
                          locations=np.array([[1.0], [-1.0]]))
        res = run_em(fit, data, EmRunConfig(tol=1e-8, max_iter=5000, init=init))
        combo = 0.3 * res.params.locations[0, 0] + 0.7 * res.params.locations[1, 0]
        assert abs(combo) <= 0.05

    def test_requires_two_components(self):
        data = Dataset(points=np.zeros((3, 1)))
        with pytest.raises(ConfigError):
            sample_em_general_step(np.array([1.0]), np.array([[0.0]]), data, 1.0, False)

    def test_empty_component_keeps_location(self):
        data = Dataset(points=np.zeros((10, 1)))
        w, loc = sample_em_general_step(
            np.array([0.5, 0.5]), np.array([[0.0], [1e6]]), data, 1.0,
            weights_free=True)
        assert loc[1, 0] == 1e6  # responsibility mass underflows to zero
        assert w[0] == pytest.approx(1.0)

    @settings(max_examples=60, deadline=None)
    @given(
        seed=st.integers(0, 2**31),
        scale=st.sampled_from([1e-8, 1.0, 1e4, 1e150, 1e200]),
        k=st.integers(2, 4),
    )
    def test_never_produces_nan(self, seed, scale, k):
        r = np.random.default_rng(seed)
        data = Dataset(points=r.standard_normal((8, 2)) * r.choice([1.0, 1e5]))
        loc = r.standard_normal((k, 2)) * scale
        w, new = sample_em_general_step(np.full(k, 1.0 / k), loc, data, 1.0,
                                        weights_free=True)
        assert np.all(np.isfinite(new))
        assert np.all(np.isfinite(w))


class TestRunEm:
    def test_two_point_convergence_to_fixed_point(self):
        # this dataset has no nonzero fixed point (sample second moment is
        # exactly 1), so the approach to 0 is sub-geometric: the change per
        # step is ~ theta^3/3, and a realistic tolerance is needed
        data = Dataset(points=np.array([[1.0], [-1.0]]))
        fit = SymmetricTwoFit(pi=0.5, sigma=1.0, d=1)
        cfg = EmRunConfig(tol=1e-6, max_iter=20_000, init=ParamState(theta=np.array([0.5])))
        res = run_em(fit, data, cfg)
        assert res.converged
        step = sample_em_symmetric_step(res.params.theta, 0.5, data, 1.0)
        assert abs(float(step[0] - res.params.theta[0])) <= 1e-6

    def test_unbalanced_null_converges_quickly(self):
        stream = derive_stream(77, 0)
        data = sample_mixture(GaussianNull(1.0, 1), 10_000, stream)
        fit = SymmetricTwoFit(pi=0.3, sigma=1.0, d=1)
        res = run_em(fit, data, EmRunConfig(tol=1e-8, max_iter=100_000), stream)
        assert res.converged
        assert res.iterations <= 500

    def test_max_iter_one(self):
        data = Dataset(points=np.array([[1.0], [-1.0]]))
        fit = SymmetricTwoFit(pi=0.5, sigma=1.0, d=1)
        cfg = EmRunConfig(tol=1e-12, max_iter=1, init=ParamState(theta=np.array([0.5])))
        res = run_em(fit, data, cfg)
        assert res.iterations == 1
        assert not res.converged

    def test_fixed_point_consistency(self):
        stream = derive_stream(5, 1)
        data = sample_mixture(GaussianNull(1.0, 2), 3000, stream)
        fit = SymmetricTwoFit(pi=0.4, sigma=1.0, d=2)
        cfg = EmRunConfig(tol=1e-9, max_iter=50_000)
        res = run_em(fit, data, cfg, stream)
        assert res.converged
        step = sample_em_symmetric_step(res.params.theta, 0.4, data, 1.0)
        assert np.linalg.norm(step - res.params.theta) <= 2e-9

    def test_sign_equivariance_exact(self):
        stream = derive_stream(6, 2)
        data = sample_mixture(GaussianNull(1.0, 1), 500, stream)
        fit = SymmetricTwoFit(pi=0.5, sigma=1.0, d=1)
        theta0 = np.array([0.8])
        plus = run_em(fit, data, EmRunConfig(tol=1e-8, max_iter=2000,
                                             init=ParamState(theta=theta0)))
        minus = run_em(fit, data, EmRunConfig(tol=1e-8, max_iter=2000,
                                              init=ParamState(theta=-theta0)))
        assert np.array_equal(plus.params.theta, -minus.params.theta)
        assert plus.iterations == minus.iterations

    def test_trajectory_non_expansive_past_first_crossing(self):
        # along a logged run with n >= 1000 d, once the norm first drops
        # below sqrt(2) sigma it never exceeds max(previous, 2 (d/n)^(1/4))
        stream = derive_stream(8, 3)
        n, d = 20_000, 1
        data = sample_mixture(GaussianNull(1.0, d), n, stream)
        fit = SymmetricTwoFit(pi=0.5, sigma=1.0, d=d)
        cfg = EmRunConfig(tol=1e-9, max_iter=3000,
                          init=ParamState(theta=np.array([2.5])),
                          record_trajectory=True)
        res = run_em(fit, data, cfg)
        values = res.trajectory.values
        floor = 2 * (d / n) ** 0.25
        crossed = False
        for prev, cur in zip(values[:-1], values[1:]):
            if prev <= math.sqrt(2):
                crossed = True
            if crossed:
                assert cur <= max(prev, floor) + 1e-12
        assert crossed

    def test_unknown_weight_run_tracks_weight(self):
        stream = derive_stream(9, 4)
        data = sample_mixture(GaussianNull(1.0, 2), 2000, stream)
        fit = UnknownWeightFit(sigma=1.0, d=2)
        init = ParamState(theta=np.array([0.02, 0.01]), pi=0.15)
        res = run_em(fit, data, EmRunConfig(tol=1e-4, max_iter=3000, init=init))
        assert res.converged
        assert 0 < res.params.pi < 1

    def test_regression_run(self):
        stream = derive_stream(10, 5)
        from em_lab.models import RegressionModel, sample_regression
        data = sample_regression(RegressionModel(theta_star=[0.0], sigma=1.0), 2000, stream)
        fit = RegressionFit(sigma=1.0, d=1)
        res = run_em(fit, data, EmRunConfig(tol=1e-8, max_iter=5000), stream)
        assert res.iterations >= 1
        assert np.isfinite(res.params.theta).all()

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            EmRunConfig(tol=0.0)
        with pytest.raises(ConfigError):
            EmRunConfig(max_iter=0)
        with pytest.raises(ConfigError):
            EmRunConfig(init="warm")
