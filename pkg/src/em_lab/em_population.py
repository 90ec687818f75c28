"""Infinite-sample (population) update operators.

Rotation invariance of the standard normal reduces every population
update of the symmetric fits to a scalar map along the current
direction, M(theta) = m(||theta||) * theta/||theta||, so all values
are computed with 1-D (or, for the regression fit, 2-D) quadrature;
no d-dimensional integration happens anywhere in this module.

For a point mass at zero the posterior weight of the positive
component is ``w(x) = pi / (pi + (1-pi) exp(-2 theta.x / sigma^2))``,
and ``2 w - 1 = tanh(theta.x / sigma^2 + log(pi/(1-pi))/2)``; the tanh
form is the numerically stable way to evaluate it (it saturates
instead of overflowing, and gives w = pi by continuity at a tie).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .models import (FitSpec, RegressionFit, SymmetricTwoFit, TrajectoryRecord,
                     UnknownWeightFit)
from .quadrature import QuadratureRule, default_rule_1d, default_rule_2d

__all__ = [
    "scalar_map_symmetric",
    "scalar_map_unknown_weight",
    "scalar_map_regression",
    "pop_em_symmetric",
    "pop_em_unknown_weight",
    "pop_em_regression",
    "PopOperatorSpec",
    "pop_trajectory",
]

_STOP_NORM = 1e-12  # below quadrature resolution; trajectories stop here


def _log_odds(pi: float) -> float:
    if not 0 < pi < 1:
        raise ConfigError("pi must lie in (0, 1)")
    return 0.5 * math.log(pi / (1.0 - pi))


def scalar_map_symmetric(r: float, pi: float = 0.5, sigma: float = 1.0,
                         rule: QuadratureRule | None = None) -> float:
    """Radial component of the symmetric-fit population update at radius r."""
    if sigma <= 0:
        raise ConfigError("invalid scale")
    if r < 0:
        raise ConfigError("radius must be nonnegative")
    c = _log_odds(pi)
    rule = rule or default_rule_1d()
    v = rule.nodes
    return float(rule.weights @ (sigma * v * np.tanh(r * v / sigma + c)))


def pop_em_symmetric(theta, pi: float = 0.5, sigma: float = 1.0,
                     rule: QuadratureRule | None = None) -> np.ndarray:
    """One population update of the symmetric two-component fit.

    The data law is N(0, sigma^2 I_d).  Returns the zero vector at
    theta = 0, which is a fixed point for every weight.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    r = float(np.linalg.norm(theta))
    if r == 0.0:
        _log_odds(pi)  # still validate
        if sigma <= 0:
            raise ConfigError("invalid scale")
        return np.zeros_like(theta)
    return scalar_map_symmetric(r, pi, sigma, rule) * theta / r


def scalar_map_unknown_weight(r: float, pi: float,
                              rule: QuadratureRule | None = None) -> tuple[float, float]:
    """Radial components (new weight, new location norm) at radius r, sigma = 1."""
    c = _log_odds(pi)
    if r < 0:
        raise ConfigError("radius must be nonnegative")
    rule = rule or default_rule_1d()
    v = rule.nodes
    t = np.tanh(r * v + c)
    pi_new = 0.5 + 0.5 * float(rule.weights @ t)
    m = float(rule.weights @ (v * t))
    return pi_new, m


def pop_em_unknown_weight(theta, pi: float,
                          rule: QuadratureRule | None = None) -> tuple[float, np.ndarray]:
    """Joint population update of (weight, location); data law is N(0, I_d)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    r = float(np.linalg.norm(theta))
    if r == 0.0:
        _log_odds(pi)
        return pi, np.zeros_like(theta)
    pi_new, m = scalar_map_unknown_weight(r, pi, rule)
    return pi_new, m * theta / r


def scalar_map_regression(r: float, rule: QuadratureRule | None = None) -> float:
    """Radial component of the balanced regression-mixture update at radius r.

    Expectation of ``tanh(r v y) v y`` over independent standard
    normals; evaluated with the 2-D tensor rule.
    """
    if r < 0:
        raise ConfigError("radius must be nonnegative")
    rule = rule or default_rule_2d()
    v = rule.nodes[:, None]
    y = rule.nodes[None, :]
    vals = np.tanh(r * v * y) * v * y
    return float(rule.weights @ vals @ rule.weights)


def pop_em_regression(theta, rule: QuadratureRule | None = None) -> np.ndarray:
    """Population update of the balanced regression fit under the null law."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    r = float(np.linalg.norm(theta))
    if r == 0.0:
        return np.zeros_like(theta)
    return scalar_map_regression(r, rule) * theta / r


@dataclass(frozen=True)
class PopOperatorSpec:
    """Which population operator to iterate, and with which rule."""

    fit: FitSpec
    rule: QuadratureRule | None = None

    def __post_init__(self):
        if not isinstance(self.fit, (SymmetricTwoFit, UnknownWeightFit, RegressionFit)):
            raise ConfigError("population updates are available for the symmetric, "
                              "unknown-weight, and regression fits only")


def pop_trajectory(spec: PopOperatorSpec, theta0, steps: int,
                   pi0: float | None = None) -> TrajectoryRecord:
    """Iterate the population operator, logging the norm per step.

    Stops early when the norm falls below 1e-12.  For the
    unknown-weight fit `pi0` is required and the weight path is logged
    alongside the norms.
    """
    if steps < 1:
        raise ConfigError("steps must be >= 1")
    theta = np.atleast_1d(np.asarray(theta0, dtype=float))
    fit = spec.fit
    record = TrajectoryRecord()
    if isinstance(fit, UnknownWeightFit):
        if pi0 is None:
            raise ConfigError("pi0 is required for the unknown-weight fit")
        pi = pi0
        record.append(np.linalg.norm(theta), pi)
        for _ in range(steps):
            pi, theta = pop_em_unknown_weight(theta, pi, spec.rule)
            record.append(np.linalg.norm(theta), pi)
            if record.values[-1] < _STOP_NORM:
                break
        return record
    record.append(np.linalg.norm(theta))
    for _ in range(steps):
        if isinstance(fit, SymmetricTwoFit):
            theta = pop_em_symmetric(theta, fit.pi, fit.sigma, spec.rule)
        else:
            theta = pop_em_regression(theta, spec.rule)
        record.append(np.linalg.norm(theta))
        if record.values[-1] < _STOP_NORM:
            break
    return record
