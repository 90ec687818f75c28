"""Closed-form theoretical quantities for the symmetric two-component fit.

Everything here is deterministic arithmetic plus 1-D quadrature:
contraction envelopes for the population update, the exponent
recursion and epoch lengths that govern how fast the sample iterates
shrink, the curvature of the population log-likelihood at zero, and
the polynomial envelopes of y*tanh(y) used in fixed-point arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError
from .quadrature import QuadratureRule, default_rule_1d, gauss_hermite

__all__ = [
    "P_CONTRACTION",
    "gamma_up",
    "gamma_low",
    "unbalanced_contraction",
    "alpha_sequence",
    "EpochSchedule",
    "epoch_schedule",
    "fisher_beta",
    "tanh_bounds_check",
    "pop_loglik",
    "pop_loglik_curve",
    "sample_loglik",
]

# p = (1 + P(|Z| <= 1)) / 2 for Z ~ N(0,1); computed from the CDF at import
# time (a frozen copy of the rounded value guards against erf regressions
# in the test suite).
P_CONTRACTION: float = 0.5 * (1.0 + math.erf(1.0 / math.sqrt(2.0)))


def gamma_up(theta_norm: float, sigma: float = 1.0) -> float:
    """Upper contraction envelope of the balanced population update."""
    if sigma <= 0:
        raise ConfigError("invalid scale")
    if theta_norm <= 0:
        raise ConfigError("theta_norm must positive")
    p = P_CONTRACTION
    return 1.0 - p + p / (1.0 + theta_norm**2 / (2.0 * sigma**2))


def gamma_low(theta_norm: float, sigma: float = 1.0) -> float:
    """Lower envelope, valid on theta_norm^2 <= 5 sigma^2 / 8."""
    if sigma <= 0:
        raise ConfigError("invalid scale")
    if theta_norm <= 0:
        raise ConfigError("theta_norm must be positive")
    if theta_norm**2 > 5.0 * sigma**2 / 8.0 * (1.0 + 1e-12):
        raise ConfigError("gamma_low requires theta_norm^2 <= 5 sigma^2 / 8")
    return 1.0 / (1.0 + 2.0 * theta_norm**2 / sigma**2)


def unbalanced_contraction(pi: float) -> float:
    """Global contraction factor 1 - rho^2/2 with rho = |1 - 2 pi|."""
    if not 0 < pi < 1:
        raise ConfigError("pi must lie in (0, 1)")
    if pi == 0.5:
        raise ConfigError("the balanced fit is not globally contractive")
    rho = abs(1.0 - 2.0 * pi)
    return 1.0 - rho**2 / 2.0


def alpha_sequence(length: int) -> list[float]:
    """Exponent recursion a_0 = 0, a_{l+1} = a_l / 3 + 1/6.

    Returns [a_0, ..., a_length]; the sequence increases toward 1/4.
    """
    if length < 1:
        raise ConfigError("length must be >= 1")
    alphas = [0.0]
    for _ in range(length):
        alphas.append(alphas[-1] / 3.0 + 1.0 / 6.0)
    return alphas


@dataclass(frozen=True)
class EpochSchedule:
    """Epoch lengths for the shrinking-annulus iteration analysis."""

    alphas: list[float]
    epoch_lengths: list[int]
    cumulative: list[int]
    omega: float
    num_epochs: int
    n: int
    d: int
    sigma: float
    delta: float
    eps: float
    theta0_norm: float


def epoch_schedule(n: int, d: int, sigma: float, delta: float, eps: float,
                   theta0_norm: float) -> EpochSchedule:
    """Noise level, exponents, and per-epoch iteration counts.

    ``omega = sigma^2 (d + log((2 L + 1)/delta)) / n`` with
    ``L = ceil(log(4/eps)/log 3) + 1`` epochs; epoch ``l >= 1`` runs
    ``ceil(2 log(1/omega) / (p omega^{2 a_{l+1}}))`` steps, and the
    initial epoch runs ``ceil((2/p) log(theta0 / (sqrt(2) sigma
    sqrt(omega))))`` steps (0 if already inside the first radius).
    """
    if n < 1 or d < 1:
        raise ConfigError("n and d must be >= 1")
    if sigma <= 0:
        raise ConfigError("invalid scale")
    if not 0 < delta < 1:
        raise ConfigError("delta must lie in (0, 1)")
    if not 0 < eps < 0.25:
        raise ConfigError("eps must lie in (0, 1/4)")
    if theta0_norm <= 0:
        raise ConfigError("theta0_norm must be positive")
    num_epochs = math.ceil(math.log(4.0 / eps) / math.log(3.0)) + 1
    omega = sigma**2 * (d + math.log((2 * num_epochs + 1) / delta)) / n
    if omega > 1:
        raise NumericError("sample size below theory threshold")
    alphas = alpha_sequence(num_epochs)
    p = P_CONTRACTION
    t0 = max(0, math.ceil(2.0 / p * math.log(theta0_norm / (math.sqrt(2.0) * sigma * math.sqrt(omega)))))
    lengths = [t0]
    for ell in range(1, num_epochs):
        lengths.append(math.ceil(2.0 / (p * omega ** (2.0 * alphas[ell + 1])) * math.log(1.0 / omega)))
    cumulative = list(np.cumsum(lengths).astype(int))
    return EpochSchedule(alphas=alphas, epoch_lengths=lengths, cumulative=cumulative,
                         omega=omega, num_epochs=num_epochs, n=n, d=d, sigma=sigma,
                         delta=delta, eps=eps, theta0_norm=theta0_norm)


def fisher_beta(pi: float) -> float:
    """Curvature 1 - 4 pi (1 - pi) of the population log-likelihood at zero."""
    if not 0 < pi < 1:
        raise ConfigError("pi must lie in (0, 1)")
    return 1.0 - 4.0 * pi * (1.0 - pi)


def tanh_bounds_check(y: float) -> tuple[bool, bool]:
    """Check y*tanh(y) against its quartic/sextic polynomial envelopes.

    Returns (lower_ok, upper_ok) for
    ``y^2 - y^4/3 <= y tanh(y) <= y^2 - y^4/3 + 2 y^6 / 15``.

    Comparisons carry a ~1e-13 relative rounding guard: near the
    tangency at zero the analytic margin (about 17 y^8 / 315) drops
    below one ulp of the evaluated sides, so a raw float comparison
    would report last-digit noise instead of the inequality.
    """
    v = y * math.tanh(y)
    lower = y**2 - y**4 / 3.0
    upper = lower + 2.0 * y**6 / 15.0
    guard = 1e-13 * max(1.0, abs(lower), abs(upper))
    return (v >= lower - guard, v <= upper + guard)


# ---------------------------------------------------------------------------
# log-likelihoods (univariate; the d-dependence is an additive constant)
# ---------------------------------------------------------------------------

def _mix_logpdf_factor(u: np.ndarray, pi: float) -> np.ndarray:
    # log(pi e^u + (1-pi) e^-u), stable for large |u|
    return np.logaddexp(math.log(pi) + u, math.log1p(-pi) - u)


def pop_loglik(theta, pi: float, sigma: float = 1.0,
               rule: QuadratureRule | None = None) -> float:
    """Population log-likelihood of the symmetric two-component fit, d = 1.

    The data law is N(0, sigma^2); `theta` may be a scalar or a vector,
    in which case its Euclidean norm is used.
    """
    if not 0 < pi < 1:
        raise ConfigError("pi must lie in (0, 1)")
    if sigma <= 0:
        raise ConfigError("invalid scale")
    rule = rule or default_rule_1d()
    r = float(np.linalg.norm(np.atleast_1d(np.asarray(theta, dtype=float))))
    const = -0.5 * (1.0 + math.log(2.0 * math.pi * sigma**2)) - r**2 / (2.0 * sigma**2)
    u = r * rule.nodes / sigma
    return const + float(rule.weights @ _mix_logpdf_factor(u, pi))


def pop_loglik_curve(pi: float, sigma: float = 1.0, span: float = 3.0,
                     step: float = 1e-3, rule: QuadratureRule | None = None):
    """Evaluate the population log-likelihood on a symmetric theta grid.

    Returns (thetas, values) with thetas = -span*sigma ... span*sigma in
    the given step.  Uses the Hermite rule by default: the curve is only
    read at |theta| <= span*sigma where both rules agree to ~1e-13, and
    the grid has thousands of points.
    """
    if not 0 < pi < 1:
        raise ConfigError("pi must lie in (0, 1)")
    if sigma <= 0:
        raise ConfigError("invalid scale")
    rule = rule or gauss_hermite(128)
    half = int(round(span * sigma / step))
    thetas = step * np.arange(-half, half + 1)
    const = -0.5 * (1.0 + math.log(2.0 * math.pi * sigma**2)) - thetas**2 / (2.0 * sigma**2)
    values = np.empty_like(thetas)
    chunk = max(1, 2**22 // len(rule))
    for i in range(0, len(thetas), chunk):
        u = np.abs(thetas[i:i + chunk, None]) * rule.nodes[None, :] / sigma
        values[i:i + chunk] = _mix_logpdf_factor(u, pi) @ rule.weights
    return thetas, const + values


def sample_loglik(theta, pi: float, data, sigma: float = 1.0) -> float:
    """Average log mixture density of the data under the symmetric fit."""
    if not 0 < pi < 1:
        raise ConfigError("pi must lie in (0, 1)")
    if sigma <= 0:
        raise ConfigError("invalid scale")
    x = data.points if hasattr(data, "points") else np.atleast_2d(np.asarray(data, dtype=float).T).T
    if x.ndim == 1:
        x = x[:, None]
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    if len(th) != x.shape[1]:
        raise ConfigError("theta dimension must match the data")
    d = x.shape[1]
    sq = np.einsum("ij,ij->i", x, x)
    const = -0.5 * d * math.log(2.0 * math.pi * sigma**2)
    u = x @ th / sigma**2
    vals = const - (sq + th @ th) / (2.0 * sigma**2) + _mix_logpdf_factor(u, pi)
    return float(np.mean(vals))
