"""Univariate analysis of the sample fixed-point equation theta = M_n(theta).

For a balanced symmetric fit in one dimension the fixed points solve
``theta = mean(x * tanh(theta x / sigma^2))``.  `g(theta) = M_n(theta)
- theta` is odd and smooth with O(1) curvature scale, so positive
roots are located by a uniform sign scan followed by bisection.  No
root can exceed ``max|x| + 1`` because M_n is an average of values
bounded by max|x|.  Roots below one scan step (possible only when the
sample second moment barely exceeds sigma^2) are outside the scan's
resolution; halving the step on a regression suite never reveals one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError
from .models import Dataset, GaussianNull, derive_stream, sample_mixture, stream_key

__all__ = [
    "sample_map_1d",
    "find_nonzero_fixed_points",
    "FixedPointScalingRow",
    "FixedPointScalingTable",
    "fixed_point_scaling_experiment",
]

_SCAN_POINTS = 1000   # scan step is theta_max / 1000
_BISECT_TOL = 1e-12


def _extract_1d(data) -> np.ndarray:
    if isinstance(data, Dataset):
        if data.d != 1:
            raise ConfigError("fixed-point analysis is univariate")
        return data.points[:, 0]
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 1:
        raise ConfigError("empty sample")
    return x


def sample_map_1d(thetas, x: np.ndarray, sigma: float = 1.0) -> np.ndarray:
    """Vectorized M_n over an array of scalar parameters."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    out = np.empty_like(thetas)
    n = len(x)
    chunk = max(1, (1 << 22) // max(n, 1))
    for i in range(0, len(thetas), chunk):
        block = thetas[i:i + chunk]
        out[i:i + chunk] = np.tanh(np.outer(block, x) / sigma**2) @ x / n
    return out


def find_nonzero_fixed_points(data, sigma: float = 1.0,
                              scan_points: int = _SCAN_POINTS) -> list[float]:
    """All positive solutions of theta = M_n(theta), sorted ascending.

    Negative roots are the mirror images (the map is odd); an empty
    list is a valid outcome.
    """
    if sigma <= 0:
        raise ConfigError("invalid scale")
    if scan_points < 2:
        raise ConfigError("scan_points must be >= 2")
    x = _extract_1d(data)
    theta_max = float(np.max(np.abs(x))) + 1.0
    grid = theta_max * np.arange(1, scan_points + 1) / scan_points
    g = sample_map_1d(grid, x, sigma) - grid

    def g_at(t: float) -> float:
        return float(np.mean(x * np.tanh(t * x / sigma**2))) - t

    roots: list[float] = []
    for i in range(len(grid)):
        if g[i] == 0.0:
            roots.append(float(grid[i]))
    for i in range(len(grid) - 1):
        if g[i] * g[i + 1] < 0.0:
            lo, hi = float(grid[i]), float(grid[i + 1])
            glo = float(g[i])
            while hi - lo > _BISECT_TOL:
                mid = 0.5 * (lo + hi)
                gm = g_at(mid)
                if gm == 0.0:
                    lo = hi = mid
                    break
                if (gm > 0) == (glo > 0):
                    lo, glo = mid, gm
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    return sorted(roots)


@dataclass(frozen=True)
class FixedPointScalingRow:
    n: int
    trials: int
    nonzero: int
    frequency: float
    median_scaled: Optional[float]  # median of |root| * n^(1/4) over nonzero trials


@dataclass(frozen=True)
class FixedPointScalingTable:
    rows: list[FixedPointScalingRow]
    master_seed: int


def fixed_point_scaling_experiment(n_list: Sequence[int], trials: int,
                                   master_seed: int) -> FixedPointScalingTable:
    """Largest-positive-fixed-point statistics over seeded null datasets.

    For each n: draw `trials` standard-normal datasets, record the
    largest positive fixed point (the attractor reached from large
    initializations) or 0 when none exists, and report the median of
    ``|root| * n^(1/4)`` over the trials that have one, plus the
    nonzero frequency.
    """
    if trials < 1:
        raise ConfigError("no trials")
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ConfigError("empty n list")
    for n in n_list:
        if n < 10:
            raise ConfigError("each n must be >= 10")
    rows = []
    for n in n_list:
        largest = []
        for trial in range(trials):
            stream = derive_stream(master_seed, stream_key(n, trial))
            data = sample_mixture(GaussianNull(sigma=1.0, d=1), n, stream)
            roots = find_nonzero_fixed_points(data, 1.0)
            largest.append(roots[-1] if roots else 0.0)
        largest = np.array(largest)
        nonzero = largest[largest > 0]
        rows.append(FixedPointScalingRow(
            n=n,
            trials=trials,
            nonzero=len(nonzero),
            frequency=len(nonzero) / trials,
            median_scaled=float(np.median(nonzero) * n**0.25) if len(nonzero) else None,
        ))
    return FixedPointScalingTable(rows=rows, master_seed=master_seed)
