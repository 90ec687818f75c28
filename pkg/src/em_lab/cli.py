"""Command-line entry point.

Exit codes: 1 configuration error, 2 numeric error, 3 I/O error,
64 usage error.  Stochastic subcommands refuse to run without --seed
unless --allow-nondeterministic is passed (the drawn seed is then
printed so the run can be replayed).  The EM_LAB_OUT environment
variable overrides the default output directory.
"""

from __future__ import annotations

import json
import os
import secrets
import sys

import click
import numpy as np

from . import fixedpoint, harness, scenarios, theory
from .em_population import PopOperatorSpec, pop_trajectory
from .em_sample import EmRunConfig, run_em
from .errors import ConfigError, NumericError
from .models import (RegressionFit, RegressionModel, SymmetricTwoFit,
                     UnknownWeightFit, derive_stream, sample_mixture,
                     sample_regression)
from .quadrature import gauss_hermite

_ALL_IDS = ", ".join(scenarios.figure_ids())


def _resolve_seed(seed, allow_nondeterministic):
    if seed is not None:
        return int(seed)
    if allow_nondeterministic:
        drawn = secrets.randbits(32)
        click.echo(f"# no --seed given; drew entropy seed {drawn}")
        return drawn
    raise ConfigError("this command is randomized: pass --seed "
                      "(or --allow-nondeterministic to draw one)")


def _out_dir(out):
    return out or harness.default_out_dir()


seed_option = click.option("--seed", type=int, default=None,
                           help="Master seed; required unless --allow-nondeterministic.")
allow_option = click.option("--allow-nondeterministic", is_flag=True, default=False,
                            help="Permit running without --seed (a fresh seed is drawn and printed).")
out_option = click.option("--out", type=click.Path(), default=None,
                          help="Output directory (default: $EM_LAB_OUT or ./em-lab-out).")


@click.group(epilog=f"Scenario/figure ids: {_ALL_IDS}")
@click.version_option(package_name="em-lab")
def cli():
    """Over-specified mixture EM: operators, experiments, theory tables."""


# ---------------------------------------------------------------------------
# pop-em
# ---------------------------------------------------------------------------

@cli.command("pop-em")
@click.option("--fit", "fit_kind",
              type=click.Choice(["balanced", "unbalanced", "unknown-weight",
                                 "regression", "two-mixture"]),
              default=None,
              help="Which population operator to iterate; omit to write the "
                   "full population-em figure bundle (a pi sweep from one "
                   "common start).")
@click.option("--pi", "pis", type=float, multiple=True,
              help="Fit weight(s) for --fit unbalanced (default 0.3).")
@click.option("--pi0", type=float, default=0.3,
              help="Starting weight for --fit unknown-weight.")
@click.option("--theta0", type=float, default=1.0, help="Starting norm.")
@click.option("--steps", type=int, default=150, help="Iteration count.")
@click.option("--sigma", type=float, default=1.0)
@out_option
def pop_em_cmd(fit_kind, pis, pi0, theta0, steps, sigma, out):
    """Iterate a population operator and write a trajectory CSV."""
    rows = []
    if fit_kind is None:
        rows = scenarios.trajectory_rows("population-em", steps)
        path = os.path.join(_out_dir(out), "population-em", "trajectory.csv")
    elif fit_kind == "two-mixture":
        rows = scenarios.trajectory_rows("two-mixture-pop", steps)
        path = os.path.join(_out_dir(out), "two-mixture-pop", "trajectory.csv")
    else:
        start = np.array([theta0])
        if fit_kind == "balanced":
            rec = pop_trajectory(PopOperatorSpec(SymmetricTwoFit(0.5, sigma, 1)), start, steps)
            rows = [("pop-em", "pi=0.5", t, v) for t, v in enumerate(rec.values)]
        elif fit_kind == "unbalanced":
            for pi in (pis or (0.3,)):
                rec = pop_trajectory(PopOperatorSpec(SymmetricTwoFit(pi, sigma, 1)), start, steps)
                rows.extend(("pop-em", f"pi={pi}", t, v) for t, v in enumerate(rec.values))
        elif fit_kind == "unknown-weight":
            rec = pop_trajectory(PopOperatorSpec(UnknownWeightFit(1.0, 1)), start, steps, pi0=pi0)
            rows = [("pop-em", f"pi0={pi0}", t, v) for t, v in enumerate(rec.values)]
            rows += [("pop-em", f"pi0={pi0}:weight", t, p) for t, p in enumerate(rec.pis)]
        else:
            rec = pop_trajectory(PopOperatorSpec(RegressionFit(1.0, 1)), start, steps)
            rows = [("pop-em", "regression", t, v) for t, v in enumerate(rec.values)]
        path = os.path.join(_out_dir(out), "pop-em", "trajectory.csv")
    harness.write_trajectory_csv(path, rows)
    click.echo(f"wrote {len(rows)} trajectory rows to {path}")


# ---------------------------------------------------------------------------
# run-em
# ---------------------------------------------------------------------------

@cli.command("run-em")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True,
              help="JSON: true_model, fit, n, d, master_seed, trial_index, init, tol, max_iter.")
@seed_option
@allow_option
@click.option("--out", type=click.Path(), default=None, help="Write the JSON result here.")
def run_em_cmd(config_path, seed, allow_nondeterministic, out):
    """Run a single EM fit on one freshly sampled dataset."""
    with open(config_path) as fh:
        spec = json.load(fh)
    d = int(spec.get("d", 1))
    n = int(spec["n"])
    master = spec.get("master_seed", seed)
    if master is None:
        master = _resolve_seed(seed, allow_nondeterministic)
    if seed is not None:
        master = seed
    trial = int(spec.get("trial_index", 0))
    stream = derive_stream(master, trial)
    true_model = harness.build_true_model(spec["true_model"], d)
    fit = harness.build_fit(spec["fit"], d)
    if isinstance(true_model, RegressionModel):
        data = sample_regression(true_model, n, stream)
    else:
        data = sample_mixture(true_model, n, stream)
    init = harness.build_init(spec.get("init"), fit, stream)
    cfg = EmRunConfig(tol=float(spec.get("tol", 1e-8)),
                      max_iter=int(spec.get("max_iter", 100_000)), init=init)
    res = run_em(fit, data, cfg)
    payload = {"iterations": res.iterations, "converged": res.converged,
               "master_seed": master, "trial_index": trial}
    p = res.params
    if p.theta is not None:
        payload["theta"] = [float(v) for v in np.atleast_1d(p.theta)]
    if p.pi is not None:
        payload["pi"] = float(p.pi)
    if p.weights is not None:
        payload["weights"] = [float(v) for v in p.weights]
    if p.locations is not None:
        payload["locations"] = [[float(v) for v in row] for row in np.atleast_2d(p.locations)]
    text = json.dumps(payload, indent=2)
    if out:
        os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
        with open(out, "w") as fh:
            fh.write(text + "\n")
    click.echo(text)


# ---------------------------------------------------------------------------
# rates
# ---------------------------------------------------------------------------

@cli.command("rates", epilog=f"Rate ids: {', '.join(scenarios.rate_scenario_ids())}; "
                             f"trajectory ids: {', '.join(scenarios.trajectory_scenario_ids())}; "
                             f"curve ids: {', '.join(scenarios.curve_scenario_ids())}.")
@click.option("--scenario", "scenario_id", type=str, default=None,
              help="Built-in scenario id (see below).")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Full ExperimentConfig JSON, or override fields for --scenario.")
@seed_option
@allow_option
@click.option("--workers", type=int, default=None,
              help="Process pool size (default: available parallelism).")
@out_option
def rates_cmd(scenario_id, config_path, seed, allow_nondeterministic, workers, out):
    """Run a scenario: rate CSVs + slope file (or trajectory/curve CSV)."""
    if scenario_id is None and config_path is None:
        raise ConfigError("pass --scenario and/or --config")
    if scenario_id in scenarios.trajectory_scenario_ids():
        rows = scenarios.trajectory_rows(scenario_id)
        path = os.path.join(_out_dir(out), scenario_id, "trajectory.csv")
        harness.write_trajectory_csv(path, rows)
        click.echo(f"wrote {path}")
        return
    if scenario_id in scenarios.curve_scenario_ids():
        rows = scenarios.curve_rows(scenario_id)
        path = os.path.join(_out_dir(out), scenario_id, "curve.csv")
        harness.write_curve_csv(path, rows)
        click.echo(f"wrote {path}")
        return

    overrides = {}
    if config_path is not None:
        with open(config_path) as fh:
            overrides = json.load(fh)
    if scenario_id is not None:
        cfg = scenarios.rate_config(scenario_id)
        allowed = {"n_grid", "d_grid", "trials", "master_seed", "tol", "max_iter", "out_dir"}
        bad = set(overrides) - allowed
        if bad:
            raise ConfigError(f"--config overrides not recognized with --scenario: {sorted(bad)}")
        if overrides:
            cfg = cfg.with_overrides(**{k: tuple(v) if k.endswith("_grid") else v
                                        for k, v in overrides.items()})
    else:
        cfg = harness.ExperimentConfig.from_dict(overrides)
    if seed is None and config_path is None:
        seed = _resolve_seed(None, allow_nondeterministic)
    if seed is not None:
        cfg = cfg.with_overrides(master_seed=int(seed))
    workers = workers or os.cpu_count() or 1
    table = harness.run_scenario(cfg, workers=workers)
    paths = table.write(_out_dir(out))
    click.echo(f"scenario {cfg.scenario}: {len(table.trial_rows)} trials "
               f"-> {paths['trials']}")
    for (q, series, slope, _b) in table.slope_rows:
        click.echo(f"  slope[{q} {series}] = {slope:+.4f}")


# ---------------------------------------------------------------------------
# fixed-points
# ---------------------------------------------------------------------------

@cli.command("fixed-points")
@click.option("--n-list", type=str, required=True, help="Comma-separated sample sizes.")
@click.option("--trials", type=int, default=200)
@seed_option
@allow_option
@out_option
def fixed_points_cmd(n_list, trials, seed, allow_nondeterministic, out):
    """Scaling of the largest positive sample fixed point on null data."""
    master = _resolve_seed(seed, allow_nondeterministic)
    ns = [int(tok) for tok in n_list.split(",") if tok.strip()]
    table = fixedpoint.fixed_point_scaling_experiment(ns, trials, master)
    path = os.path.join(_out_dir(out), "fixed-points", "scaling.csv")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    import csv as _csv
    with open(path, "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(["n", "trials", "nonzero", "frequency", "median_scaled"])
        for row in table.rows:
            w.writerow([row.n, row.trials, row.nonzero, harness.fmt(row.frequency),
                        "" if row.median_scaled is None else harness.fmt(row.median_scaled)])
    for row in table.rows:
        med = "-" if row.median_scaled is None else f"{row.median_scaled:.4f}"
        click.echo(f"n={row.n}: nonzero {row.nonzero}/{row.trials} "
                   f"(freq {row.frequency:.3f}), median |root| n^(1/4) = {med}")
    click.echo(f"wrote {path}")


# ---------------------------------------------------------------------------
# epoch-trace
# ---------------------------------------------------------------------------

@cli.command("epoch-trace")
@click.option("--n", type=int, required=True)
@click.option("--d", type=int, default=1)
@click.option("--sigma", type=float, default=1.0)
@click.option("--delta", type=float, default=0.05)
@click.option("--eps", type=float, default=0.05)
@click.option("--theta0-norm", type=float, default=1.0)
@seed_option
@allow_option
@out_option
def epoch_trace_cmd(n, d, sigma, delta, eps, theta0_norm, seed,
                    allow_nondeterministic, out):
    """Observed vs theoretical epoch crossings of one balanced run."""
    master = _resolve_seed(seed, allow_nondeterministic)
    trace = harness.epoch_trace(n, d, sigma, delta, eps, theta0_norm, master)
    path = os.path.join(_out_dir(out), "epoch-trace", "trace.csv")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    import csv as _csv
    with open(path, "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(["epoch", "alpha", "radius", "theory_steps", "observed_steps"])
        for ell, (rad, theo, obs) in enumerate(zip(trace.radii, trace.theory_steps,
                                                   trace.observed_steps), start=1):
            w.writerow([ell, harness.fmt(trace.schedule.alphas[ell]), harness.fmt(rad),
                        theo, "" if obs is None else obs])
    for ell, (rad, theo, obs) in enumerate(zip(trace.radii, trace.theory_steps,
                                               trace.observed_steps), start=1):
        click.echo(f"epoch {ell}: radius {rad:.5g}, theory <= {theo} steps, "
                   f"observed {obs if obs is not None else 'not reached'}")
    click.echo(f"final norm {trace.final_norm:.6g}; wrote {path}")


# ---------------------------------------------------------------------------
# deviation
# ---------------------------------------------------------------------------

@cli.command("deviation")
@click.option("--n-list", type=str, required=True, help="Comma-separated sample sizes.")
@click.option("--d", type=int, default=1)
@click.option("--r", "radius", type=float, default=1.0)
@click.option("--pi", type=float, default=0.5)
@click.option("--grid-size", type=int, default=200)
@click.option("--trials", type=int, default=50)
@seed_option
@allow_option
@out_option
def deviation_cmd(n_list, d, radius, pi, grid_size, trials, seed,
                  allow_nondeterministic, out):
    """Sup deviation between the sample and population operators on a ball."""
    master = _resolve_seed(seed, allow_nondeterministic)
    ns = [int(tok) for tok in n_list.split(",") if tok.strip()]
    path = os.path.join(_out_dir(out), "deviation", "deviation.csv")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    import csv as _csv
    with open(path, "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(["n", "trial", "max_deviation"])
        for n in ns:
            table = harness.deviation_sup_estimate(n, d, radius, pi, grid_size,
                                                   trials, master)
            for trial, dev in enumerate(table.per_trial):
                w.writerow([n, trial, harness.fmt(dev)])
            click.echo(f"n={n}: mean sup deviation {table.mean:.6g} over {trials} trials")
    click.echo(f"wrote {path}")


# ---------------------------------------------------------------------------
# loglik
# ---------------------------------------------------------------------------

@cli.command("loglik")
@click.option("--pi", "pis", type=float, multiple=True,
              help="Mixture-fit weights (default 0.1 0.3 0.5).")
@click.option("--sigma", type=float, default=1.0)
@click.option("--grid", type=str, default=None, help="lo:hi:step (default -3:3:0.01).")
@click.option("--model", type=click.Choice(["mixture", "regression"]), default="mixture")
@click.option("--theta-star", "theta_stars", type=float, multiple=True,
              help="Regression signal strengths (default 0 0.7).")
@out_option
def loglik_cmd(pis, sigma, grid, model, theta_stars, out):
    """Population log-likelihood profiles (the curve CSVs)."""
    if grid is None:
        lo, hi, step = -3.0, 3.0, 0.01
    else:
        try:
            lo, hi, step = (float(tok) for tok in grid.split(":"))
        except ValueError as exc:
            raise ConfigError("--grid must be lo:hi:step") from exc
        if not (lo < hi and step > 0):
            raise ConfigError("--grid must satisfy lo < hi and step > 0")
    thetas = lo + step * np.arange(int(round((hi - lo) / step)) + 1)
    rows = []
    if model == "mixture":
        rule = gauss_hermite(128)
        for pi in (pis or (0.1, 0.3, 0.5)):
            vals = [theory.pop_loglik(t, pi, sigma, rule) for t in thetas]
            rows.extend(("pop-likelihood", f"pi={pi}", t, v) for t, v in zip(thetas, vals))
        path = os.path.join(_out_dir(out), "pop-likelihood", "curve.csv")
    else:
        span = max(abs(lo), abs(hi))
        for ts in (theta_stars or (0.0, 0.7)):
            xs, vals = scenarios.regression_loglik_curve(ts, span=span, step=step)
            rows.extend(("mix-of-reg", f"theta*={ts}", t, v) for t, v in zip(xs, vals))
        path = os.path.join(_out_dir(out), "mix-of-reg", "curve.csv")
    harness.write_curve_csv(path, rows)
    click.echo(f"wrote {len(rows)} curve rows to {path}")


# ---------------------------------------------------------------------------
# theory
# ---------------------------------------------------------------------------

@cli.group("theory")
def theory_group():
    """Closed-form tables: contraction factors, exponents, curvature."""


@theory_group.command("alpha")
@click.option("--steps", type=int, required=True)
def theory_alpha(steps):
    """Exponent recursion a_{l+1} = a_l/3 + 1/6 from a_0 = 0."""
    for a in theory.alpha_sequence(steps):
        click.echo(str(a))


@theory_group.command("gamma")
@click.option("--theta-norm", type=float, required=True)
@click.option("--sigma", type=float, default=1.0)
def theory_gamma(theta_norm, sigma):
    """Contraction envelopes at a given iterate norm."""
    click.echo(f"gamma_up = {theory.gamma_up(theta_norm, sigma)!r}")
    if theta_norm**2 <= 5 * sigma**2 / 8:
        click.echo(f"gamma_low = {theory.gamma_low(theta_norm, sigma)!r}")
    else:
        click.echo("gamma_low = (outside validity range)")


@theory_group.command("fisher")
@click.option("--pi", type=float, required=True)
def theory_fisher(pi):
    """Log-likelihood curvature coefficient 1 - 4 pi (1 - pi)."""
    click.echo(str(theory.fisher_beta(pi)))


@theory_group.command("schedule")
@click.option("--n", type=int, required=True)
@click.option("--d", type=int, default=1)
@click.option("--sigma", type=float, default=1.0)
@click.option("--delta", type=float, default=0.05)
@click.option("--eps", type=float, default=0.05)
@click.option("--theta0-norm", type=float, default=1.0)
def theory_schedule(n, d, sigma, delta, eps, theta0_norm):
    """Epoch lengths for the shrinking-radius iteration budget."""
    sched = theory.epoch_schedule(n, d, sigma, delta, eps, theta0_norm)
    click.echo(f"omega = {sched.omega!r}, epochs = {sched.num_epochs}")
    for ell, (t, total) in enumerate(zip(sched.epoch_lengths, sched.cumulative)):
        click.echo(f"epoch {ell}: alpha_next = {sched.alphas[ell + 1]:.6f}, "
                   f"steps {t}, cumulative {total}")


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(130)
    except click.UsageError as exc:
        exc.show()
        sys.exit(64)
    except click.ClickException as exc:
        exc.show()
        sys.exit(64)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)
    except NumericError as exc:
        click.echo(f"numeric error: {exc}", err=True)
        sys.exit(2)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(3)
    return 0


if __name__ == "__main__":
    main()
