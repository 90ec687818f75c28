"""Monte-Carlo experiment harness: seeded trials over (n, d) grids.

Every trial owns a generator derived from ``(master_seed,
mix(series, n, d, trial))``, so results are a pure function of
(config, master_seed) and identical whether trials run serially or in
a process pool; output rows are canonicalized by (scenario, n, d,
trial) before writing.

CSV layout under ``<out_dir>/<scenario>/``:

* ``trials.csv``     header ``scenario,n,d,trial,metric,value,iterations,converged``
* ``aggregate.csv``  header ``scenario,n,d,trials,mean,std,report``
* ``slopes.csv``     header ``scenario,series,slope,intercept``

Floats are serialized with 17 significant digits.  Multi-series
scenarios qualify the scenario column as ``<scenario>:<label>``; the
slope ``series`` column names the axis, e.g. ``vs-n@d=1``.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import models
from .em_population import scalar_map_symmetric
from .em_sample import EmRunConfig, EmResult, ParamState, run_em
from .errors import ConfigError, NumericError
from .metrics import (MixingMeasure, aggregate_trials, slope_fit,
                      true_mixing_measure, wasserstein2)
from .models import (Dataset, FitSpec, GaussianNull, GeneralKFit, GeneralMixture,
                     RegressionFit, RegressionModel, SymmetricTwoFit, TrueModel,
                     TwoMixture, UnknownWeightFit, derive_stream, sample_mixture,
                     sample_regression, stream_key)
from .theory import EpochSchedule, epoch_schedule

__all__ = [
    "ExperimentConfig",
    "RateTable",
    "run_scenario",
    "DeviationTable",
    "deviation_sup_estimate",
    "EpochTrace",
    "epoch_trace",
    "fmt",
    "write_trajectory_csv",
    "write_curve_csv",
    "validate_rate_csvs",
    "default_out_dir",
]

TRIAL_HEADER = ["scenario", "n", "d", "trial", "metric", "value", "iterations", "converged"]
AGG_HEADER = ["scenario", "n", "d", "trials", "mean", "std", "report"]
SLOPE_HEADER = ["scenario", "series", "slope", "intercept"]


def fmt(x: float) -> str:
    """17 significant digits; round-trips any double."""
    return format(float(x), ".17g")


def default_out_dir() -> str:
    return os.environ.get("EM_LAB_OUT", "em-lab-out")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """One scenario: a list of series run over an (n, d) grid.

    `series` entries are plain dicts (the JSON form):
      {"label": str, "true_model": {...}, "fit": {...},
       "metric": {...}, "init": {...}}
    """

    scenario: str
    series: tuple
    n_grid: tuple
    d_grid: tuple
    trials: int
    master_seed: int
    tol: float = 1e-8
    max_iter: int = 100_000
    out_dir: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(dict(s) for s in self.series))
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "d_grid", tuple(int(d) for d in self.d_grid))
        if not self.scenario:
            raise ConfigError("scenario id must be non-empty")
        if not self.series:
            raise ConfigError("at least one series is required")
        if not self.n_grid or not self.d_grid:
            raise ConfigError("n and d grids must be non-empty")
        if min(self.n_grid) < 1 or min(self.d_grid) < 1:
            raise ConfigError("grid entries must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.tol <= 0 or self.max_iter < 1:
            raise ConfigError("invalid EM run configuration")
        labels = [s.get("label", "") for s in self.series]
        if len(set(labels)) != len(labels):
            raise ConfigError("series labels must be unique")
        for s in self.series:
            for key in ("true_model", "fit", "metric"):
                if key not in s:
                    raise ConfigError(f"series is missing the '{key}' entry")

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "series": [dict(s) for s in self.series],
            "n_grid": list(self.n_grid),
            "d_grid": list(self.d_grid),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "out_dir": self.out_dir,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {"scenario", "series", "n_grid", "d_grid", "trials",
                 "master_seed", "tol", "max_iter", "out_dir"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        missing = {"scenario", "series", "n_grid", "d_grid", "trials", "master_seed"} - set(d)
        if missing:
            raise ConfigError(f"missing config fields: {sorted(missing)}")
        return cls(**{k: d[k] for k in d})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)

    def scenario_label(self, series_idx: int) -> str:
        label = self.series[series_idx].get("label", "")
        return f"{self.scenario}:{label}" if label else self.scenario


# ---------------------------------------------------------------------------
# builders: dict specs -> model/fit/init objects
# ---------------------------------------------------------------------------

def build_true_model(spec: dict, d: int) -> TrueModel:
    variant = spec.get("variant")
    sigma = float(spec.get("sigma", 1.0))
    if variant == "gaussian-null":
        return GaussianNull(sigma=sigma, d=d)
    if variant == "two-mixture":
        theta = np.asarray(spec["theta_star"], dtype=float)
        if len(theta) != d:
            raise ConfigError("two-mixture true model has a fixed dimension")
        return TwoMixture(theta_star=theta, pi=float(spec["pi"]), sigma=sigma)
    if variant == "regression":
        theta = np.asarray(spec["theta_star"], dtype=float)
        if len(theta) != d:
            raise ConfigError("regression true model has a fixed dimension")
        return RegressionModel(theta_star=theta, sigma=sigma)
    if variant == "general-mixture":
        loc = np.atleast_2d(np.asarray(spec["locations"], dtype=float))
        if loc.shape[1] != d:
            raise ConfigError("general-mixture true model has a fixed dimension")
        return GeneralMixture(weights=np.asarray(spec["weights"], dtype=float),
                              locations=loc, sigma=sigma)
    raise ConfigError(f"unknown true-model variant: {variant!r}")


def build_fit(spec: dict, d: int) -> FitSpec:
    variant = spec.get("variant")
    sigma = float(spec.get("sigma", 1.0))
    if variant == "symmetric-two":
        return SymmetricTwoFit(pi=float(spec["pi"]), sigma=sigma, d=d)
    if variant == "symmetric-two-unknown-weight":
        return UnknownWeightFit(sigma=sigma, d=d)
    if variant == "general-k":
        w = spec.get("weights")
        ties = tuple(tuple(p) for p in spec.get("tie_pairs", ()))
        return GeneralKFit(k=int(spec["k"]),
                           weights=None if w is None else np.asarray(w, dtype=float),
                           sigma=sigma, d=d, tie_pairs=ties)
    if variant == "regression-balanced":
        return RegressionFit(sigma=sigma, d=d)
    raise ConfigError(f"unknown fit variant: {variant!r}")


def build_init(spec: Optional[dict], fit: FitSpec, stream: np.random.Generator) -> ParamState:
    """Materialize an init spec, consuming draws in a fixed order."""
    spec = spec or {"kind": "random-standard-normal"}
    kind = spec.get("kind")
    pi0 = spec.get("pi0")
    if kind == "random-standard-normal":
        if isinstance(fit, GeneralKFit):
            loc = stream.standard_normal((fit.k, fit.d))
            for (i, j) in fit.tie_pairs:
                loc[j] = -loc[i]
            w = fit.weights.copy() if fit.weights is not None else np.full(fit.k, 1.0 / fit.k)
            return ParamState(weights=w, locations=loc)
        theta = stream.standard_normal(fit.d)
        if isinstance(fit, UnknownWeightFit):
            return ParamState(theta=theta, pi=float(pi0 if pi0 is not None else 0.25))
        return ParamState(theta=theta)
    if kind == "sphere":
        u = stream.standard_normal(fit.d)
        norm = float(spec["norm"])
        theta = norm * u / np.linalg.norm(u)
        if isinstance(fit, UnknownWeightFit):
            return ParamState(theta=theta, pi=float(pi0 if pi0 is not None else 0.25))
        return ParamState(theta=theta)
    if kind == "near":
        centers = np.asarray(spec["centers"], dtype=float)
        scale = float(spec.get("scale", 0.0))
        if isinstance(fit, GeneralKFit):
            centers = np.atleast_2d(centers)
            if centers.shape != (fit.k, fit.d):
                raise ConfigError("init centers must be (k, d)")
            loc = centers + scale * stream.standard_normal((fit.k, fit.d))
            for (i, j) in fit.tie_pairs:
                loc[j] = -loc[i]
            w = fit.weights.copy() if fit.weights is not None else np.full(fit.k, 1.0 / fit.k)
            return ParamState(weights=w, locations=loc)
        theta = centers.ravel() + scale * stream.standard_normal(fit.d)
        if isinstance(fit, UnknownWeightFit):
            return ParamState(theta=theta, pi=float(pi0 if pi0 is not None else 0.25))
        return ParamState(theta=theta)
    if kind == "explicit":
        if isinstance(fit, GeneralKFit):
            w = spec.get("weights")
            return ParamState(
                weights=np.asarray(w, dtype=float) if w is not None
                else (fit.weights.copy() if fit.weights is not None else np.full(fit.k, 1.0 / fit.k)),
                locations=np.atleast_2d(np.asarray(spec["locations"], dtype=float)))
        theta = np.asarray(spec["theta"], dtype=float)
        if isinstance(fit, UnknownWeightFit):
            return ParamState(theta=theta, pi=float(pi0 if pi0 is not None else 0.25))
        return ParamState(theta=theta)
    raise ConfigError(f"unknown init kind: {kind!r}")


def fitted_mixing_measure(fit: FitSpec, state: ParamState) -> MixingMeasure:
    if isinstance(fit, SymmetricTwoFit):
        return MixingMeasure(np.array([fit.pi, 1.0 - fit.pi]),
                             np.vstack([state.theta, -state.theta]))
    if isinstance(fit, UnknownWeightFit):
        return MixingMeasure(np.array([state.pi, 1.0 - state.pi]),
                             np.vstack([state.theta, -state.theta]))
    if isinstance(fit, GeneralKFit):
        return MixingMeasure(state.weights.copy(), state.locations.copy())
    raise ConfigError("fit has no mixing measure")


def metric_value(spec: dict, fit: FitSpec, state: ParamState, true_model: TrueModel) -> float:
    kind = spec.get("kind")
    if kind == "location-error":
        theta = np.atleast_1d(np.asarray(state.theta, dtype=float))
        target = spec.get("target")
        target = np.zeros_like(theta) if target is None else np.asarray(target, dtype=float)
        err = float(np.linalg.norm(theta - target))
        if spec.get("signflip", False):
            err = min(err, float(np.linalg.norm(theta + target)))
        return err
    if kind == "component-location-error":
        loc = state.locations[int(spec["component"])]
        target = np.asarray(spec["target"], dtype=float)
        return float(np.linalg.norm(loc - target))
    if kind == "w2":
        return wasserstein2(fitted_mixing_measure(fit, state), true_mixing_measure(true_model))
    raise ConfigError(f"unknown metric kind: {kind!r}")


# ---------------------------------------------------------------------------
# trial execution
# ---------------------------------------------------------------------------

def run_trial(cfg: ExperimentConfig, series_idx: int, n: int, d: int,
              trial: int) -> tuple[float, int, bool]:
    """One seeded (dataset, init, run, metric) trial; pure in its arguments."""
    sdict = cfg.series[series_idx]
    stream = derive_stream(cfg.master_seed, stream_key(series_idx, n, d, trial))
    true_model = build_true_model(sdict["true_model"], d)
    fit = build_fit(sdict["fit"], d)
    if isinstance(true_model, RegressionModel):
        data = sample_regression(true_model, n, stream)
    else:
        data = sample_mixture(true_model, n, stream)
    init = build_init(sdict.get("init"), fit, stream)
    result = run_em(fit, data, EmRunConfig(tol=cfg.tol, max_iter=cfg.max_iter, init=init))
    value = metric_value(sdict["metric"], fit, result.params, true_model)
    return value, result.iterations, result.converged


def _run_cell(cfg_dict: dict, series_idx: int, n: int, d: int,
              t_lo: int, t_hi: int) -> list[tuple]:
    cfg = ExperimentConfig.from_dict(cfg_dict)
    out = []
    for trial in range(t_lo, t_hi):
        value, iterations, converged = run_trial(cfg, series_idx, n, d, trial)
        out.append((series_idx, n, d, trial, value, iterations, converged))
    return out


# ---------------------------------------------------------------------------
# rate tables
# ---------------------------------------------------------------------------

@dataclass
class RateTable:
    """Per-trial rows, aggregates, and log-log slopes for one scenario."""

    scenario: str
    config: ExperimentConfig
    trial_rows: list = field(default_factory=list)      # (scenario_q, n, d, trial, metric, value, iters, conv)
    aggregate_rows: list = field(default_factory=list)  # (scenario_q, n, d, trials, mean, std, report)
    slope_rows: list = field(default_factory=list)      # (scenario_q, series, slope, intercept)

    def report(self, label: str, n: int, d: int) -> float:
        q = f"{self.scenario}:{label}" if label else self.scenario
        for row in self.aggregate_rows:
            if row[0] == q and row[1] == n and row[2] == d:
                return row[6]
        raise KeyError((label, n, d))

    def slope(self, label: str, series: str) -> float:
        q = f"{self.scenario}:{label}" if label else self.scenario
        for row in self.slope_rows:
            if row[0] == q and row[1] == series:
                return row[2]
        raise KeyError((label, series))

    def values(self, label: str, n: int, d: int) -> list[float]:
        q = f"{self.scenario}:{label}" if label else self.scenario
        return [r[5] for r in self.trial_rows if r[0] == q and r[1] == n and r[2] == d]

    def iteration_counts(self, label: str, n: int, d: int) -> list[int]:
        q = f"{self.scenario}:{label}" if label else self.scenario
        return [r[6] for r in self.trial_rows if r[0] == q and r[1] == n and r[2] == d]

    def converged_flags(self, label: str, n: int, d: int) -> list[bool]:
        q = f"{self.scenario}:{label}" if label else self.scenario
        return [r[7] for r in self.trial_rows if r[0] == q and r[1] == n and r[2] == d]

    def write(self, out_dir: Optional[str] = None) -> dict:
        out_dir = out_dir or self.config.out_dir or default_out_dir()
        target = os.path.join(out_dir, self.scenario)
        os.makedirs(target, exist_ok=True)
        paths = {
            "trials": os.path.join(target, "trials.csv"),
            "aggregate": os.path.join(target, "aggregate.csv"),
            "slopes": os.path.join(target, "slopes.csv"),
        }
        with open(paths["trials"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRIAL_HEADER)
            for (q, n, d, trial, metric, value, iters, conv) in self.trial_rows:
                w.writerow([q, n, d, trial, metric, fmt(value), iters,
                            "true" if conv else "false"])
        with open(paths["aggregate"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(AGG_HEADER)
            for (q, n, d, trials, mean, std, report) in self.aggregate_rows:
                w.writerow([q, n, d, trials, fmt(mean), fmt(std), fmt(report)])
        with open(paths["slopes"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(SLOPE_HEADER)
            for (q, series, slope, intercept) in self.slope_rows:
                w.writerow([q, series, fmt(slope), fmt(intercept)])
        return paths


def run_scenario(cfg: ExperimentConfig, workers: Optional[int] = None) -> RateTable:
    """Run every (series, n, d, trial) combination and aggregate.

    `workers` > 1 distributes trial chunks over a process pool; the
    output is identical to the serial run.
    """
    workers = workers or 1
    cells = [(si, n, d)
             for si in range(len(cfg.series))
             for n in cfg.n_grid
             for d in cfg.d_grid]
    cfg_dict = cfg.to_dict()
    raw: list[tuple] = []
    if workers <= 1:
        for (si, n, d) in cells:
            raw.extend(_run_cell(cfg_dict, si, n, d, 0, cfg.trials))
    else:
        chunk = max(1, math.ceil(cfg.trials / (4 * workers)))
        jobs = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for (si, n, d) in cells:
                for lo in range(0, cfg.trials, chunk):
                    jobs.append(pool.submit(_run_cell, cfg_dict, si, n, d,
                                            lo, min(lo + chunk, cfg.trials)))
            for job in jobs:
                raw.extend(job.result())

    table = RateTable(scenario=cfg.scenario, config=cfg)
    raw.sort(key=lambda r: (cfg.scenario_label(r[0]), r[1], r[2], r[3]))
    for (si, n, d, trial, value, iters, conv) in raw:
        q = cfg.scenario_label(si)
        kind = cfg.series[si]["metric"]["kind"]
        table.trial_rows.append((q, n, d, trial, kind, value, iters, conv))

    for si in range(len(cfg.series)):
        q = cfg.scenario_label(si)
        for n in cfg.n_grid:
            for d in cfg.d_grid:
                vals = [r[4] for r in raw if r[0] == si and r[1] == n and r[2] == d]
                mean, std, rep = aggregate_trials(vals)
                table.aggregate_rows.append((q, n, d, len(vals), mean, std, rep))

    def _agg(si, n, d):
        q = cfg.scenario_label(si)
        for row in table.aggregate_rows:
            if row[0] == q and row[1] == n and row[2] == d:
                return row[6]
        raise KeyError

    for si in range(len(cfg.series)):
        q = cfg.scenario_label(si)
        if len(cfg.n_grid) >= 2:
            for d in cfg.d_grid:
                pts = [(n, _agg(si, n, d)) for n in cfg.n_grid]
                if all(p[1] > 0 for p in pts):
                    s, b = slope_fit(pts)
                    table.slope_rows.append((q, f"vs-n@d={d}", s, b))
        if len(cfg.d_grid) >= 2:
            for n in cfg.n_grid:
                pts = [(d, _agg(si, n, d)) for d in cfg.d_grid]
                if all(p[1] > 0 for p in pts):
                    s, b = slope_fit(pts)
                    table.slope_rows.append((q, f"vs-d@n={n}", s, b))
    return table


# ---------------------------------------------------------------------------
# population-vs-sample deviation experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeviationTable:
    n: int
    d: int
    radius: float
    pi: float
    grid_size: int
    trials: int
    master_seed: int
    per_trial: list          # max deviation per trial
    mean: float


def deviation_sup_estimate(n: int, d: int, r: float, pi: float, grid_size: int,
                           trials: int, master_seed: int) -> DeviationTable:
    """Empirical sup over a random ball grid of |M_n(theta) - M(theta)|.

    The population value comes from the radial quadrature reduction;
    data are standard normal in d dimensions (sigma = 1).
    """
    if d > 3:
        raise ConfigError("deviation grid is limited to d <= 3")
    if trials < 1:
        raise ConfigError("no trials")
    if grid_size < 1:
        raise ConfigError("grid_size must be >= 1")
    if r < 0:
        raise ConfigError("radius must be nonnegative")
    if not 0 < pi < 1:
        raise ConfigError("pi must lie in (0, 1)")
    c = 0.5 * math.log(pi / (1.0 - pi))
    maxima = []
    for trial in range(trials):
        stream = derive_stream(master_seed, stream_key(n, d, trial))
        data = sample_mixture(GaussianNull(sigma=1.0, d=d), n, stream)
        x = data.points
        if r == 0.0:
            pts = np.zeros((grid_size, d))
        else:
            u = stream.standard_normal((grid_size, d))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            radii = r * stream.random(grid_size) ** (1.0 / d)
            pts = u * radii[:, None]
        t = np.tanh(x @ pts.T + c)              # (n, grid)
        m_sample = t.T @ x / n                  # (grid, d)
        norms = np.linalg.norm(pts, axis=1)
        m_pop = np.zeros_like(pts)
        nz = norms > 0
        if np.any(nz):
            scal = np.array([scalar_map_symmetric(rr, pi, 1.0) for rr in norms[nz]])
            m_pop[nz] = pts[nz] * (scal / norms[nz])[:, None]
        dev = np.linalg.norm(m_sample - m_pop, axis=1)
        maxima.append(float(dev.max()))
    return DeviationTable(n=n, d=d, radius=r, pi=pi, grid_size=grid_size,
                          trials=trials, master_seed=master_seed,
                          per_trial=maxima, mean=float(np.mean(maxima)))


# ---------------------------------------------------------------------------
# epoch trace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EpochTrace:
    schedule: EpochSchedule
    radii: list            # target radius per epoch (sqrt(2) sigma omega^alpha_l)
    theory_steps: list     # cumulative step budget per epoch
    observed_steps: list   # first iteration at or below each radius (None if never)
    final_norm: float
    norms: np.ndarray


def epoch_trace(n: int, d: int, sigma: float, delta: float, eps: float,
                theta0_norm: float, master_seed: int) -> EpochTrace:
    """Run one balanced-fit trajectory and compare against the epoch budget.

    Records, for each epoch radius ``sqrt(2) sigma omega^{alpha_l}``
    (l = 1..L), the first iteration whose norm is at or below it, next
    to the theoretical cumulative budget.
    """
    if not 0 < delta < 1:
        raise ConfigError("delta must lie in (0, 1)")
    sched = epoch_schedule(n, d, sigma, delta, eps, theta0_norm)
    stream = derive_stream(master_seed, stream_key(n, d))
    data = sample_mixture(GaussianNull(sigma=sigma, d=d), n, stream)
    direction = stream.standard_normal(d)
    theta = theta0_norm * direction / np.linalg.norm(direction)
    total = sched.cumulative[-1]
    x = data.points
    s2 = sigma**2
    norms = np.empty(total + 1)
    norms[0] = theta0_norm
    for t in range(1, total + 1):
        theta = (np.tanh(x @ theta / s2) @ x) / n
        norms[t] = np.linalg.norm(theta)
    radii = [math.sqrt(2.0) * sigma * sched.omega ** a for a in sched.alphas[1:]]
    observed = []
    for rad in radii:
        hits = np.nonzero(norms <= rad)[0]
        observed.append(int(hits[0]) if len(hits) else None)
    return EpochTrace(schedule=sched, radii=radii, theory_steps=list(sched.cumulative),
                      observed_steps=observed, final_norm=float(norms[-1]), norms=norms)


# ---------------------------------------------------------------------------
# auxiliary CSV writers and schema validation
# ---------------------------------------------------------------------------

def write_trajectory_csv(path: str, rows: Sequence[tuple]) -> None:
    """Rows of (scenario, series, step, value)."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "series", "step", "value"])
        for (scenario, series, step, value) in rows:
            w.writerow([scenario, series, int(step), fmt(value)])


def write_curve_csv(path: str, rows: Sequence[tuple]) -> None:
    """Rows of (scenario, series, x, value)."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "series", "x", "value"])
        for (scenario, series, x, value) in rows:
            w.writerow([scenario, series, fmt(x), fmt(value)])


def validate_rate_csvs(scenario_dir: str) -> None:
    """Check headers and parseability of a scenario's three CSV files."""
    expected = {
        "trials.csv": TRIAL_HEADER,
        "aggregate.csv": AGG_HEADER,
        "slopes.csv": SLOPE_HEADER,
    }
    for name, header in expected.items():
        path = os.path.join(scenario_dir, name)
        if not os.path.exists(path):
            raise ConfigError(f"missing CSV file: {name}")
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            got = next(reader, None)
            if got != header:
                raise ConfigError(f"{name}: expected header {header}, got {got}")
            for row in reader:
                if len(row) != len(header):
                    raise ConfigError(f"{name}: ragged row {row}")
                if name == "trials.csv":
                    int(row[1]); int(row[2]); int(row[3]); float(row[5]); int(row[6])
                    if row[7] not in ("true", "false"):
                        raise ConfigError("trials.csv: converged must be true/false")
                elif name == "aggregate.csv":
                    int(row[1]); int(row[2]); int(row[3])
                    float(row[4]); float(row[5]); float(row[6])
                else:
                    float(row[2]); float(row[3])
