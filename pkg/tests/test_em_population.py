import math

import numpy as np
import pytest

from em_lab.em_population import (PopOperatorSpec, pop_em_regression,
                                  pop_em_symmetric, pop_em_unknown_weight,
                                  pop_trajectory, scalar_map_regression,
                                  scalar_map_symmetric)
from em_lab.errors import ConfigError
from em_lab.models import RegressionFit, SymmetricTwoFit, UnknownWeightFit
from em_lab.theory import gamma_low, gamma_up

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


class TestSymmetricOperator:
    def test_zero_is_a_fixed_point(self):
        for pi in (0.1, 0.5, 0.9):
            out = pop_em_symmetric(np.zeros(3), pi, 1.0)
            assert np.array_equal(out, np.zeros(3))

    def test_balanced_small_radius_bracket(self):
        # envelope endpoints recomputed from the CDF-based constant, and
        # frozen values cross-checked
        value = float(pop_em_symmetric(np.array([0.1]), 0.5, 1.0)[0])
        lo = 0.1 * gamma_low(0.1, 1.0)
        hi = 0.1 * gamma_up(0.1, 1.0)
        assert lo == pytest.approx(0.0980392, abs=1e-7)
        assert hi == pytest.approx(0.0995814, abs=1e-7)
        assert lo <= value <= hi

    def test_large_radius_stays_in_universal_ball(self):
        value = float(np.linalg.norm(pop_em_symmetric(np.array([10.0]), 0.5, 1.0)))
        assert value <= SQRT_2_OVER_PI + 1e-12

    def test_universal_radius_all_weights(self):
        for pi in (0.1, 0.5):
            for r in (0.1, 1.0, 10.0, 100.0):
                val = abs(scalar_map_symmetric(r, pi, 1.0))
                assert val <= SQRT_2_OVER_PI + 1e-9, (pi, r)

    def test_invalid_scale_rejected(self):
        with pytest.raises(ConfigError, match="invalid scale"):
            pop_em_symmetric(np.array([1.0]), 0.5, 0.0)

    def test_odd_symmetry_exact(self):
        theta = np.array([0.3, -0.4, 0.1])
        plus = pop_em_symmetric(theta, 0.5, 1.0)
        minus = pop_em_symmetric(-theta, 0.5, 1.0)
        assert np.array_equal(plus, -minus)

    def test_rotation_equivariance(self, rng):
        theta = np.array([0.6, -0.2, 0.3, 0.1])
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        direct = pop_em_symmetric(q @ theta, 0.5, 1.0)
        rotated = q @ pop_em_symmetric(theta, 0.5, 1.0)
        assert np.allclose(direct, rotated, atol=1e-14)

    def test_matches_full_dimensional_monte_carlo(self, rng):
        # the radial reduction against a direct d-dimensional average,
        # 1e7 draws, three standard errors
        theta = np.array([0.5, -0.3, 0.2, 0.4])
        sigma, pi = 1.3, 0.3
        n = 10_000_000
        x = sigma * rng.standard_normal((n, 4))
        c = 0.5 * math.log(pi / (1 - pi))
        t = np.tanh(x @ theta / sigma**2 + c)
        mc = (t @ x) / n
        se = sigma * math.sqrt(4.0 / n)  # crude per-coordinate scale
        assert np.linalg.norm(mc - pop_em_symmetric(theta, pi, sigma)) <= 3 * se * 2

    def test_contraction_factor_unbalanced(self):
        for pi in (0.1, 0.3, 0.45):
            rho = abs(1 - 2 * pi)
            for r in np.linspace(0.2, 10, 25):
                val = abs(scalar_map_symmetric(r, pi, 1.0))
                assert val <= (1 - rho**2 / 2) * r + 1e-9

    def test_tracks_the_reference_curve_at_small_radius(self):
        # frozen envelope from a quadrature scan: the balanced map stays
        # within 2.7% of r / (1 + r^2) on (0, 0.5]
        worst = 0.0
        for r in np.linspace(1e-3, 0.5, 100):
            worst = max(worst, abs(scalar_map_symmetric(r, 0.5, 1.0) - r / (1 + r**2)) / r)
        assert worst <= 0.027


class TestUnknownWeightOperator:
    def test_zero_location_fixes_weight(self):
        pi_new, theta_new = pop_em_unknown_weight(np.zeros(2), 0.3)
        assert pi_new == 0.3
        assert np.array_equal(theta_new, np.zeros(2))
        pi_new, theta_new = pop_em_unknown_weight(np.zeros(1), 0.5)
        assert (pi_new, float(theta_new[0])) == (0.5, 0.0)

    def test_small_radius_contraction_bounds(self):
        # rho = 0.4; both components move by O(|theta|) at most
        theta = np.array([0.1, 0.0])
        pi_new, theta_new = pop_em_unknown_weight(theta, 0.3)
        assert abs(pi_new - 0.3) <= (1 - 0.4**2 / 2) * 0.1 / 2
        assert np.linalg.norm(theta_new) <= (1 - 0.4**2 / 2) * 0.1

    def test_invalid_weight_rejected(self):
        with pytest.raises(ConfigError):
            pop_em_unknown_weight(np.array([0.1]), 1.5)


class TestRegressionOperator:
    def test_zero_fixed_point(self):
        assert np.array_equal(pop_em_regression(np.zeros(2)), np.zeros(2))

    def test_bracket_at_small_radius(self):
        value = scalar_map_regression(0.2)
        assert 0.2 * (1 - 3 * 0.04) - 1e-10 <= value <= 0.2 * (1 - 2 * 0.04) + 1e-10

    def test_value_at_half(self):
        # frozen from three independent evaluations (tensor quadrature on
        # two rules and the exact product-normal density); the quartic
        # envelope r(1 - 2 r^2) = 0.25 does not hold this far out
        assert scalar_map_regression(0.5) == pytest.approx(0.3504581617, abs=1e-8)

    def test_lower_envelope_holds_globally(self):
        for r in np.linspace(0.02, 0.5, 25):
            assert scalar_map_regression(r) >= r * (1 - 3 * r**2) - 1e-10

    def test_odd_symmetry(self):
        theta = np.array([0.2, -0.1])
        assert np.array_equal(pop_em_regression(theta), -pop_em_regression(-theta))


class TestTrajectories:
    def test_one_balanced_step_decreases_norm(self):
        spec = PopOperatorSpec(SymmetricTwoFit(pi=0.5, sigma=1.0, d=1))
        rec = pop_trajectory(spec, np.array([1.0]), 1)
        assert rec.values[1] < rec.values[0]

    def test_unbalanced_geometric_envelope(self):
        spec = PopOperatorSpec(SymmetricTwoFit(pi=0.3, sigma=1.0, d=1))
        rec = pop_trajectory(spec, np.array([1.0]), 60)
        for t, v in enumerate(rec.values):
            assert v <= 0.92**t + 1e-12

    def test_balanced_bracket_step_by_step(self):
        spec = PopOperatorSpec(SymmetricTwoFit(pi=0.5, sigma=1.0, d=1))
        rec = pop_trajectory(spec, np.array([1.0]), 40)
        for prev, cur in zip(rec.values[:-1], rec.values[1:]):
            assert cur <= gamma_up(prev, 1.0) * prev + 1e-12
            if prev**2 <= 5 / 8:
                assert cur >= gamma_low(prev, 1.0) * prev - 1e-12

    def test_unknown_weight_requires_pi0(self):
        spec = PopOperatorSpec(UnknownWeightFit(sigma=1.0, d=1))
        with pytest.raises(ConfigError):
            pop_trajectory(spec, np.array([0.5]), 5)
        rec = pop_trajectory(spec, np.array([0.5]), 5, pi0=0.2)
        assert len(rec.pis) == len(rec.values)

    def test_regression_trajectory_shrinks(self):
        spec = PopOperatorSpec(RegressionFit(sigma=1.0, d=1))
        rec = pop_trajectory(spec, np.array([0.4]), 30)
        assert rec.values[-1] < rec.values[0]
        assert all(b <= a for a, b in zip(rec.values[:-1], rec.values[1:]))

    def test_rejects_general_fits(self):
        from em_lab.models import GeneralKFit
        with pytest.raises(ConfigError):
            PopOperatorSpec(GeneralKFit(k=3, weights=None, sigma=1.0, d=1))
