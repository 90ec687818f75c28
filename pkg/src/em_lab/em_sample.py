"""Sample update operators and full runs with the standard stopping rule.

A run stops when the Euclidean change of the full parameter vector
drops to `tol` (criterion "converged") or after `max_iter` steps.
Posterior weights are evaluated through tanh of the log-odds shifted
argument, which is the stable form of the ratio of component
densities: it saturates instead of overflowing, and a tied point gets
weight pi by continuity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import ConfigError, NumericError
from .models import (Dataset, FitSpec, GeneralKFit, RegressionFit,
                     SymmetricTwoFit, TrajectoryRecord, UnknownWeightFit)

__all__ = [
    "ParamState",
    "EmRunConfig",
    "EmResult",
    "sample_em_symmetric_step",
    "sample_em_unknown_weight_step",
    "sample_em_regression_step",
    "sample_em_general_step",
    "run_em",
]

_EMPTY_MASS = 1e-30  # a component below this keeps its previous location


@dataclass(frozen=True)
class ParamState:
    """Current iterate; fields not used by a fit stay None."""

    theta: Optional[np.ndarray] = None
    pi: Optional[float] = None
    weights: Optional[np.ndarray] = None
    locations: Optional[np.ndarray] = None


@dataclass(frozen=True)
class EmRunConfig:
    """Stopping rule and initialization for one run.

    `init` is either the string "random-standard-normal" (each free
    location coordinate drawn N(0, 1) from the run's stream) or an
    explicit ParamState.
    """

    tol: float = 1e-8
    max_iter: int = 100_000
    init: Union[str, ParamState] = "random-standard-normal"
    record_trajectory: bool = False

    def __post_init__(self):
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if isinstance(self.init, str) and self.init != "random-standard-normal":
            raise ConfigError("unknown init kind")


@dataclass
class EmResult:
    params: ParamState
    iterations: int
    converged: bool
    trajectory: Optional[TrajectoryRecord] = None


def _check_data(data: Dataset, d: int, regression: bool = False) -> None:
    if data.n < 1:
        raise ConfigError("empty sample")
    if data.d != d:
        raise ConfigError("data dimension does not match the parameter")
    if regression and not data.is_regression:
        raise ConfigError("regression fit requires responses")


def _log_odds(pi: float) -> float:
    if not 0 < pi < 1:
        raise ConfigError("pi must lie in (0, 1)")
    return 0.5 * math.log(pi / (1.0 - pi))


# ---------------------------------------------------------------------------
# one-step operators
# ---------------------------------------------------------------------------

def sample_em_symmetric_step(theta, pi: float, data: Dataset, sigma: float) -> np.ndarray:
    """One sample update of the symmetric fixed-weight fit."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if sigma <= 0:
        raise ConfigError("invalid scale")
    c = _log_odds(pi)
    _check_data(data, len(theta))
    x = data.points
    t = np.tanh(x @ theta / sigma**2 + c)
    return (t @ x) / data.n


def sample_em_unknown_weight_step(theta, pi: float, data: Dataset,
                                  sigma: float = 1.0) -> tuple[float, np.ndarray]:
    """Joint sample update of (weight, location) for the symmetric fit."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if sigma <= 0:
        raise ConfigError("invalid scale")
    c = _log_odds(pi)
    _check_data(data, len(theta))
    x = data.points
    t = np.tanh(x @ theta / sigma**2 + c)
    pi_new = 0.5 + 0.5 * float(t.mean())
    return pi_new, (t @ x) / data.n


def _solve_gram(gram: np.ndarray, rhs: np.ndarray, d: int) -> np.ndarray:
    evals = np.linalg.eigvalsh(gram)
    if evals[0] <= 1e-12 * (np.trace(gram) / d):
        raise NumericError("degenerate design")
    return np.linalg.solve(gram, rhs)


def sample_em_regression_step(theta, data: Dataset) -> np.ndarray:
    """One sample update of the balanced regression-mixture fit.

    Normalization is the weighted-least-squares one: the Gram matrix
    and the response moment are both per-sample averages, so the step
    is invariant to n.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    _check_data(data, len(theta), regression=True)
    x, y = data.points, data.responses
    t = np.tanh((x @ theta) * y)
    gram = x.T @ x / data.n
    rhs = (x.T @ (t * y)) / data.n
    return _solve_gram(gram, rhs, len(theta))


def _responsibilities(points: np.ndarray, weights: np.ndarray, locations: np.ndarray,
                      sigma: float) -> np.ndarray:
    # log r_ik ∝ log w_k + x_i.theta_k/sigma^2 - |theta_k|^2/(2 sigma^2);
    # the |x_i|^2 term is constant per row and cancels in the softmax.
    with np.errstate(all="ignore"):
        logits = (np.log(weights)[None, :]
                  + (points @ locations.T - 0.5 * np.einsum("kj,kj->k", locations, locations))
                  / sigma**2)
    # overflowing intermediates mean "infinitely unlikely component";
    # a row with no finite logit gets uniform responsibilities
    logits = np.where(np.isfinite(logits), logits, -np.inf)
    peak = logits.max(axis=1, keepdims=True)
    dead = ~np.isfinite(peak[:, 0])
    if np.any(dead):
        logits[dead] = 0.0
        peak[dead] = 0.0
    r = np.exp(logits - peak)
    r /= r.sum(axis=1, keepdims=True)
    return r


def sample_em_general_step(weights, locations, data: Dataset, sigma: float,
                           weights_free: bool, tie_pairs=(), point_weights=None):
    """One update of a general k-component location fit.

    `tie_pairs` holds (i, j) pairs constrained to mirrored locations
    theta_j = -theta_i; the pair is re-estimated jointly.  When
    `point_weights` is given the per-point average becomes a weighted
    one (used for grid-integration variants); weights should sum to 1.
    Responsibilities are computed in the log domain, so the update is
    NaN-free for any finite data and initialization.
    """
    weights = np.asarray(weights, dtype=float)
    locations = np.atleast_2d(np.asarray(locations, dtype=float))
    k = len(weights)
    if k < 2:
        raise ConfigError("k must be >= 2")
    if locations.shape[0] != k:
        raise ConfigError("one location per component required")
    if sigma <= 0:
        raise ConfigError("invalid scale")
    if np.any(weights <= 0):
        raise ConfigError("weights must be positive")
    _check_data(data, locations.shape[1])
    x = data.points
    r = _responsibilities(x, weights, locations, sigma)
    if point_weights is None:
        mass = r.sum(axis=0)                   # raw responsibility counts
        moment = r.T @ x
        total = float(data.n)
    else:
        pw = np.asarray(point_weights, dtype=float)
        if pw.shape != (data.n,):
            raise ConfigError("one point weight per observation required")
        mass = pw @ r
        moment = (r * pw[:, None]).T @ x
        total = float(pw.sum())

    new_loc = locations.copy()
    tied = set()
    for (i, j) in tie_pairs:
        tied.update((i, j))
        den = mass[i] + mass[j]
        if den >= _EMPTY_MASS:
            rep = (moment[i] - moment[j]) / den
            new_loc[i] = rep
            new_loc[j] = -rep
    for kk in range(k):
        if kk in tied:
            continue
        if mass[kk] >= _EMPTY_MASS:
            new_loc[kk] = moment[kk] / mass[kk]

    if weights_free:
        new_w = mass / total
        for (i, j) in tie_pairs:
            new_w[i] = new_w[j] = (mass[i] + mass[j]) / (2.0 * total)
    else:
        new_w = weights.copy()
    return new_w, new_loc


# ---------------------------------------------------------------------------
# full runs
# ---------------------------------------------------------------------------

def _default_init(fit: FitSpec, stream: np.random.Generator) -> ParamState:
    if isinstance(fit, SymmetricTwoFit) or isinstance(fit, RegressionFit):
        return ParamState(theta=stream.standard_normal(fit.d))
    if isinstance(fit, UnknownWeightFit):
        # scenarios always pass an explicit weight; 1/4 is the midpoint
        # of the weight's half-interval and keeps the default usable
        return ParamState(theta=stream.standard_normal(fit.d), pi=0.25)
    if isinstance(fit, GeneralKFit):
        loc = stream.standard_normal((fit.k, fit.d))
        for (i, j) in fit.tie_pairs:
            loc[j] = -loc[i]
        w = fit.weights.copy() if fit.weights is not None else np.full(fit.k, 1.0 / fit.k)
        return ParamState(weights=w, locations=loc)
    raise ConfigError("unknown fit specification")


def run_em(fit: FitSpec, data: Dataset, cfg: EmRunConfig,
           stream: Optional[np.random.Generator] = None) -> EmResult:
    """Iterate the fit's sample operator from cfg.init until convergence."""
    if isinstance(cfg.init, ParamState):
        state = cfg.init
    else:
        if stream is None:
            raise ConfigError("random initialization requires a stream")
        state = _default_init(fit, stream)

    traj = TrajectoryRecord() if cfg.record_trajectory else None

    if isinstance(fit, SymmetricTwoFit) or isinstance(fit, RegressionFit):
        theta = np.atleast_1d(np.asarray(state.theta, dtype=float))
        if isinstance(fit, RegressionFit):
            _check_data(data, fit.d, regression=True)
            x, y = data.points, data.responses
            gram = x.T @ x / data.n
            evals = np.linalg.eigvalsh(gram)
            if evals[0] <= 1e-12 * (np.trace(gram) / fit.d):
                raise NumericError("degenerate design")
            def step(th):
                t = np.tanh((x @ th) * y)
                return np.linalg.solve(gram, (x.T @ (t * y)) / data.n)
        else:
            _check_data(data, fit.d)
            x = data.points
            c = _log_odds(fit.pi)
            s2 = fit.sigma**2
            def step(th):
                return (np.tanh(x @ th / s2 + c) @ x) / data.n
        if traj is not None:
            traj.append(np.linalg.norm(theta))
        converged = False
        it = 0
        for it in range(1, cfg.max_iter + 1):
            new = step(theta)
            delta = float(np.linalg.norm(new - theta))
            theta = new
            if traj is not None:
                traj.append(np.linalg.norm(theta))
            if delta <= cfg.tol:
                converged = True
                break
        return EmResult(ParamState(theta=theta), it, converged, traj)

    if isinstance(fit, UnknownWeightFit):
        theta = np.atleast_1d(np.asarray(state.theta, dtype=float))
        pi = float(state.pi)
        _check_data(data, fit.d)
        if traj is not None:
            traj.append(np.linalg.norm(theta), pi)
        converged = False
        it = 0
        for it in range(1, cfg.max_iter + 1):
            pi_new, theta_new = sample_em_unknown_weight_step(theta, pi, data, fit.sigma)
            delta = math.sqrt(float(np.sum((theta_new - theta) ** 2)) + (pi_new - pi) ** 2)
            theta, pi = theta_new, pi_new
            if traj is not None:
                traj.append(np.linalg.norm(theta), pi)
            if delta <= cfg.tol:
                converged = True
                break
        return EmResult(ParamState(theta=theta, pi=pi), it, converged, traj)

    if isinstance(fit, GeneralKFit):
        w = np.asarray(state.weights, dtype=float)
        loc = np.atleast_2d(np.asarray(state.locations, dtype=float))
        _check_data(data, fit.d)
        if traj is not None:
            traj.append(np.linalg.norm(loc))
        converged = False
        it = 0
        for it in range(1, cfg.max_iter + 1):
            w_new, loc_new = sample_em_general_step(w, loc, data, fit.sigma,
                                                    fit.weights_free, fit.tie_pairs)
            delta = math.sqrt(float(np.sum((loc_new - loc) ** 2))
                              + float(np.sum((w_new - w) ** 2)))
            w, loc = w_new, loc_new
            if traj is not None:
                traj.append(np.linalg.norm(loc))
            if delta <= cfg.tol:
                converged = True
                break
        return EmResult(ParamState(weights=w, locations=loc), it, converged, traj)

    raise ConfigError("unknown fit specification")
