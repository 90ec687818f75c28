"""Error metrics and trial aggregation.

The second-order Wasserstein distance between discrete mixing measures
neutralizes label switching when comparing fitted mixtures against the
data-generating one.  Problem sizes here are tiny (at most 16 atoms a
side), so the transportation problem is solved exactly with the u-v
(dual/stepping-stone) simplex; no entropic smoothing, because slope
fits downstream would inherit any approximation bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError
from . import models as _models

__all__ = [
    "MixingMeasure",
    "wasserstein2",
    "transport_min_cost",
    "slope_fit",
    "aggregate_trials",
    "true_mixing_measure",
]

_MAX_ATOMS = 16


@dataclass(frozen=True)
class MixingMeasure:
    """Discrete probability measure on component locations."""

    weights: np.ndarray
    locations: np.ndarray  # (k, d)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        loc = np.atleast_2d(np.asarray(self.locations, dtype=float))
        if loc.shape[0] != len(w):
            loc = loc.T  # allow a column of scalars
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "locations", loc)
        if w.ndim != 1 or loc.shape[0] != len(w):
            raise ConfigError("one weight per atom required")
        if np.any(w <= 0):
            raise ConfigError("atom weights must be positive")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise ConfigError("atom weights must sum to 1 within 1e-9")

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def d(self) -> int:
        return self.locations.shape[1]


def true_mixing_measure(model) -> MixingMeasure:
    """Mixing measure of a mixture-type data-generating model."""
    if isinstance(model, _models.GaussianNull):
        return MixingMeasure(np.array([1.0]), np.zeros((1, model.d)))
    if isinstance(model, _models.TwoMixture):
        return MixingMeasure(np.array([model.pi, 1.0 - model.pi]),
                             np.vstack([model.theta_star, -model.theta_star]))
    if isinstance(model, _models.GeneralMixture):
        return MixingMeasure(model.weights.copy(), model.locations.copy())
    raise ConfigError("model has no mixing measure")


# ---------------------------------------------------------------------------
# exact transportation problem
# ---------------------------------------------------------------------------

def _northwest_corner(supply: np.ndarray, demand: np.ndarray):
    """Initial basic feasible solution; exactly m+n-1 basic cells."""
    m, n = len(supply), len(demand)
    a = supply.copy()
    b = demand.copy()
    flow = np.zeros((m, n))
    basis: list[tuple[int, int]] = []
    i = j = 0
    while True:
        q = min(a[i], b[j])
        flow[i, j] = q
        basis.append((i, j))
        a[i] -= q
        b[j] -= q
        if i == m - 1 and j == n - 1:
            break
        # advance one index at a time so the basis stays a spanning tree
        if a[i] <= 0 and i < m - 1:
            i += 1
        else:
            j += 1
    return flow, basis


def _duals(basis, cost, m, n):
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    adj: dict[int, list[int]] = {}
    for (i, j) in basis:
        adj.setdefault(i, []).append(m + j)
        adj.setdefault(m + j, []).append(i)
    u[0] = 0.0
    stack = [0]
    seen = {0}
    while stack:
        node = stack.pop()
        for nb in adj.get(node, ()):
            if nb in seen:
                continue
            seen.add(nb)
            if node < m:  # row -> col: u[i] + v[j] = c[i, j]
                v[nb - m] = cost[node, nb - m] - u[node]
            else:
                u[nb] = cost[nb, node - m] - v[node - m]
            stack.append(nb)
    if np.any(np.isnan(u)) or np.any(np.isnan(v)):
        raise NumericError("transportation basis is not a spanning tree")
    return u, v


def _tree_path(basis, start, goal, m):
    """Unique node path from `start` to `goal` in the basis tree."""
    adj: dict[int, list[int]] = {}
    for (i, j) in basis:
        adj.setdefault(i, []).append(m + j)
        adj.setdefault(m + j, []).append(i)
    parent = {start: None}
    stack = [start]
    while stack:
        node = stack.pop()
        if node == goal:
            break
        for nb in adj.get(node, ()):
            if nb not in parent:
                parent[nb] = node
                stack.append(nb)
    path = [goal]
    while path[-1] != start:
        path.append(parent[path[-1]])
    return path[::-1]


def transport_min_cost(supply, demand, cost) -> tuple[np.ndarray, float]:
    """Exact minimum-cost transportation plan between two histograms.

    Bland's pivoting rule is used for both the entering and the leaving
    variable, which rules out cycling on degenerate instances (equal
    weights produce those routinely).
    """
    supply = np.asarray(supply, dtype=float)
    demand = np.asarray(demand, dtype=float)
    cost = np.asarray(cost, dtype=float)
    m, n = len(supply), len(demand)
    if cost.shape != (m, n):
        raise ConfigError("cost matrix shape must match supply/demand")
    if abs(float(supply.sum() - demand.sum())) > 1e-6:
        raise ConfigError("unbalanced measures")
    scale = max(1.0, float(np.max(np.abs(cost))))
    flow, basis = _northwest_corner(supply, demand)
    basis_set = set(basis)
    for _ in range(20000):
        u, v = _duals(basis, cost, m, n)
        reduced = cost - u[:, None] - v[None, :]
        entering = None
        for i in range(m):  # Bland: lexicographically first negative
            for j in range(n):
                if (i, j) not in basis_set and reduced[i, j] < -1e-12 * scale:
                    entering = (i, j)
                    break
            if entering:
                break
        if entering is None:
            total = float(np.sum(flow * cost))
            return flow, total
        i0, j0 = entering
        path = _tree_path(basis, i0, m + j0, m)
        # cycle edges alternate -,+,-,... starting from the edge leaving i0
        edges = []
        for a, b in zip(path[:-1], path[1:]):
            cell = (a, b - m) if a < m else (b, a - m)
            edges.append(cell)
        minus = edges[0::2]
        t = min(flow[c] for c in minus)
        leaving = min((c for c in minus if flow[c] <= t), key=lambda c: c)
        for idx, c in enumerate(edges):
            flow[c] += t if idx % 2 else -t
        flow[i0, j0] = t
        flow[leaving] = 0.0
        basis_set.remove(leaving)
        basis_set.add((i0, j0))
        basis = sorted(basis_set)
    raise NumericError("transportation simplex failed to converge")


def wasserstein2(a: MixingMeasure, b: MixingMeasure) -> float:
    """Exact W2 distance between two small discrete mixing measures."""
    if a.d != b.d:
        raise ConfigError("mixing measures must share a dimension")
    if a.k > _MAX_ATOMS or b.k > _MAX_ATOMS:
        raise ConfigError(f"at most {_MAX_ATOMS} atoms per measure")
    if abs(float(a.weights.sum() - b.weights.sum())) > 1e-6:
        raise ConfigError("unbalanced measures")
    diff = a.locations[:, None, :] - b.locations[None, :, :]
    cost = np.einsum("ijk,ijk->ij", diff, diff)
    _, total = transport_min_cost(a.weights, b.weights, cost)
    return math.sqrt(max(total, 0.0))


# ---------------------------------------------------------------------------
# slope fitting and trial aggregation
# ---------------------------------------------------------------------------

def slope_fit(points) -> tuple[float, float]:
    """Least squares of log(err) on log(n); returns (slope, intercept)."""
    pts = [(float(n), float(e)) for n, e in points]
    ns = np.array([p[0] for p in pts])
    errs = np.array([p[1] for p in pts])
    if len(set(ns.tolist())) < 2:
        raise ConfigError("need at least two distinct n values")
    if np.any(errs <= 0):
        raise ConfigError("errors must be positive for a log-log fit")
    slope, intercept = np.polyfit(np.log(ns), np.log(errs), 1)
    return float(slope), float(intercept)


def aggregate_trials(errors) -> tuple[float, float, float]:
    """Mean, sample standard deviation, and mean + 2 sd of trial errors."""
    arr = np.asarray(list(errors), dtype=float)
    if arr.size == 0:
        raise ConfigError("no trials to aggregate")
    mean = float(arr.mean())
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return mean, sd, mean + 2.0 * sd
