"""Data-generating models, fitted-model specifications, and seeded sampling.

Reproducibility contract: every sampler is a pure function of its
arguments and the supplied generator, and `derive_stream` builds
pairwise-independent-quality generators from ``(master_seed,
trial_index)`` via a 64-bit mixing hash feeding a counter-based
(Philox) bit generator.  Experiments are therefore a pure function of
(config, master_seed) no matter how trials are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import ConfigError

__all__ = [
    "GaussianNull",
    "TwoMixture",
    "RegressionModel",
    "GeneralMixture",
    "TrueModel",
    "SymmetricTwoFit",
    "UnknownWeightFit",
    "GeneralKFit",
    "RegressionFit",
    "FitSpec",
    "Dataset",
    "TrajectoryRecord",
    "sample_mixture",
    "sample_regression",
    "derive_stream",
    "stream_key",
]

_WEIGHT_TOL = 1e-12


def _as_vector(x) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ConfigError("expected a 1-D location vector")
    return v


# ---------------------------------------------------------------------------
# true (data-generating) models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianNull:
    """Single Gaussian N(0, sigma^2 I_d): the point-null law."""

    sigma: float = 1.0
    d: int = 1

    def __post_init__(self):
        if self.sigma <= 0:
            raise ConfigError("invalid scale")
        if self.d < 1:
            raise ConfigError("d must be >= 1")


@dataclass(frozen=True)
class TwoMixture:
    """Two-component mixture pi N(theta*, sigma^2 I) + (1-pi) N(-theta*, sigma^2 I)."""

    theta_star: np.ndarray
    pi: float
    sigma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "theta_star", _as_vector(self.theta_star))
        if not 0 < self.pi < 1:
            raise ConfigError("pi must lie in (0, 1)")
        if self.sigma <= 0:
            raise ConfigError("invalid scale")

    @property
    def d(self) -> int:
        return len(self.theta_star)


@dataclass(frozen=True)
class RegressionModel:
    """Linear model Y = X^T theta* + sigma * noise with X ~ N(0, I_d)."""

    theta_star: np.ndarray
    sigma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "theta_star", _as_vector(self.theta_star))
        if self.sigma <= 0:
            raise ConfigError("invalid scale")

    @property
    def d(self) -> int:
        return len(self.theta_star)


@dataclass(frozen=True)
class GeneralMixture:
    """k-component Gaussian location mixture with common scale sigma."""

    weights: np.ndarray
    locations: np.ndarray  # shape (k, d)
    sigma: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        loc = np.atleast_2d(np.asarray(self.locations, dtype=float))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "locations", loc)
        if w.ndim != 1 or len(w) != loc.shape[0]:
            raise ConfigError("one weight per location required")
        if np.any(w <= 0) or abs(float(w.sum()) - 1.0) > _WEIGHT_TOL:
            raise ConfigError("weights must be positive and sum to 1 within 1e-12")
        if self.sigma <= 0:
            raise ConfigError("invalid scale")

    @property
    def d(self) -> int:
        return self.locations.shape[1]


TrueModel = Union[GaussianNull, TwoMixture, RegressionModel, GeneralMixture]


# ---------------------------------------------------------------------------
# fitted-model specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetricTwoFit:
    """Fit pi N(theta, sigma^2 I) + (1-pi) N(-theta, sigma^2 I); only theta is free."""

    pi: float = 0.5
    sigma: float = 1.0
    d: int = 1

    def __post_init__(self):
        if not 0 < self.pi < 1:
            raise ConfigError("pi must lie in (0, 1)")
        if self.sigma <= 0:
            raise ConfigError("invalid scale")
        if self.d < 1:
            raise ConfigError("d must be >= 1")


@dataclass(frozen=True)
class UnknownWeightFit:
    """Symmetric two-component fit with the weight estimated jointly with theta."""

    sigma: float = 1.0
    d: int = 1

    def __post_init__(self):
        if self.sigma <= 0:
            raise ConfigError("invalid scale")
        if self.d < 1:
            raise ConfigError("d must be >= 1")


@dataclass(frozen=True)
class GeneralKFit:
    """k-component location fit; weights either fixed or estimated.

    ``tie_pairs`` lists index pairs (i, j) constrained to mirrored
    locations ``theta_j = -theta_i``; the M-step maximizes under the
    tie, which is what makes a mirrored pair with equal weights
    algebraically identical to the symmetric two-component fit.
    """

    k: int
    weights: Optional[np.ndarray] = None  # None => weights are estimated
    sigma: float = 1.0
    d: int = 1
    tie_pairs: tuple = ()

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError("k must be >= 2")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            object.__setattr__(self, "weights", w)
            if len(w) != self.k or np.any(w <= 0) or abs(float(w.sum()) - 1.0) > _WEIGHT_TOL:
                raise ConfigError("fixed weights must be a length-k simplex vector")
        if self.sigma <= 0:
            raise ConfigError("invalid scale")
        seen: set[int] = set()
        for pair in self.tie_pairs:
            i, j = pair
            if not (0 <= i < self.k and 0 <= j < self.k) or i == j:
                raise ConfigError("tie pair indices must be distinct component indices")
            if i in seen or j in seen:
                raise ConfigError("tie pairs must be disjoint")
            seen.update((i, j))

    @property
    def weights_free(self) -> bool:
        return self.weights is None


@dataclass(frozen=True)
class RegressionFit:
    """Balanced two-component regression fit Y|X ~ (1/2) N(+/- theta^T X, sigma^2)."""

    sigma: float = 1.0
    d: int = 1

    def __post_init__(self):
        if self.sigma <= 0:
            raise ConfigError("invalid scale")
        if self.d < 1:
            raise ConfigError("d must be >= 1")


FitSpec = Union[SymmetricTwoFit, UnknownWeightFit, GeneralKFit, RegressionFit]


# ---------------------------------------------------------------------------
# datasets and trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Dataset:
    """n observations: rows of `points`, plus `responses` for regression data."""

    points: np.ndarray
    responses: Optional[np.ndarray] = None
    provenance: Optional[tuple] = None  # (master_seed, trial_index)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        object.__setattr__(self, "points", pts)
        if pts.shape[0] < 1:
            raise ConfigError("empty sample")
        if self.responses is not None:
            y = np.asarray(self.responses, dtype=float).ravel()
            object.__setattr__(self, "responses", y)
            if len(y) != pts.shape[0]:
                raise ConfigError("responses must match the number of rows")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def is_regression(self) -> bool:
        return self.responses is not None


@dataclass
class TrajectoryRecord:
    """Per-iteration log of the iterate norm (index 0 is the initial point)."""

    values: list = field(default_factory=list)
    pis: Optional[list] = None

    def append(self, norm: float, pi: Optional[float] = None) -> None:
        self.values.append(float(norm))
        if pi is not None:
            if self.pis is None:
                self.pis = []
            self.pis.append(float(pi))

    def __len__(self) -> int:
        return len(self.values)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def sample_mixture(model: TrueModel, n: int, stream: np.random.Generator) -> Dataset:
    """Draw n i.i.d. points from a mixture-type true model.

    Draw order is fixed (component uniforms first, then Gaussian noise)
    so that outputs are reproducible for a given stream.
    """
    if n < 1:
        raise ConfigError("empty sample")
    if isinstance(model, GaussianNull):
        pts = model.sigma * stream.standard_normal((n, model.d))
    elif isinstance(model, TwoMixture):
        signs = np.where(stream.random(n) < model.pi, 1.0, -1.0)
        pts = signs[:, None] * model.theta_star + model.sigma * stream.standard_normal((n, model.d))
    elif isinstance(model, GeneralMixture):
        u = stream.random(n)
        idx = np.minimum(np.searchsorted(np.cumsum(model.weights), u, side="right"),
                         len(model.weights) - 1)
        pts = model.locations[idx] + model.sigma * stream.standard_normal((n, model.d))
    else:
        raise ConfigError("sample_mixture expects a mixture-type true model")
    return Dataset(points=pts)


def sample_regression(model: RegressionModel, n: int, stream: np.random.Generator) -> Dataset:
    """Draw n i.i.d. covariate/response pairs (covariates first, then noise)."""
    if n < 1:
        raise ConfigError("empty sample")
    if not isinstance(model, RegressionModel):
        raise ConfigError("sample_regression expects a regression true model")
    x = stream.standard_normal((n, model.d))
    y = x @ model.theta_star + model.sigma * stream.standard_normal(n)
    return Dataset(points=x, responses=y)


# ---------------------------------------------------------------------------
# stream derivation
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream_key(*parts: int) -> int:
    """Mix any number of integers into a single 64-bit key."""
    acc = 0x6A09E667F3BCC908
    for p in parts:
        acc = _splitmix64(acc ^ _splitmix64(int(p) & _MASK64))
    return acc


def derive_stream(master_seed: int, trial_index: int) -> np.random.Generator:
    """Deterministic, independent-quality generator for one trial.

    Identical inputs give identical streams; distinct inputs give
    distinct Philox keys (up to a 128-bit hash collision).
    """
    hi = _splitmix64(int(master_seed) & _MASK64)
    lo = _splitmix64(hi ^ _splitmix64(int(trial_index) & _MASK64))
    return np.random.Generator(np.random.Philox(key=(hi << 64) | lo))
