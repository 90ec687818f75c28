"""Figure definitions and the CSV -> PNG pipeline.

Inputs live under ``<csv_dir>/<figure_id>/``:

* rate figures read ``aggregate.csv`` (scenario,n,d,trials,mean,std,report)
  and ``slopes.csv`` (scenario,series,slope,intercept);
* trajectory figures read ``trajectory.csv`` (scenario,series,step,value);
* curve figures read ``curve.csv`` (scenario,series,x,value).

Rate and trajectory panels follow the usual conventions for this kind
of study: log-log for error-versus-size plots so a power law shows up
as a line whose slope is annotated, and semilog-y for iterate
trajectories so geometric convergence shows up as a line.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


class SchemaError(ValueError):
    """An input CSV is missing, empty, or malformed."""


class UnknownFigureError(ValueError):
    """The requested figure id is not registered."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str          # "rate" | "trajectory" | "curve"
    axis: str          # rate figures: "n" or "d"
    title: str
    xlabel: str
    ylabel: str


FIGURES: dict[str, FigureSpec] = {
    "snr-strong": FigureSpec("rate", "n", "Strong signal: error vs sample size",
                             "sample size n", "mean + 2 sd of error"),
    "snr-null": FigureSpec("rate", "n", "No signal: error vs sample size",
                           "sample size n", "mean + 2 sd of error"),
    "unbalanced-rates": FigureSpec("rate", "d", "Unbalanced fit: error vs dimension",
                                   "dimension d", "mean + 2 sd of error"),
    "sample-balanced-rates": FigureSpec("rate", "d", "Balanced fit: error vs dimension",
                                        "dimension d", "mean + 2 sd of error"),
    "more-cases": FigureSpec("rate", "n", "Free-location fits on null data",
                             "sample size n", "mean + 2 sd of W2 error"),
    "two-mixture": FigureSpec("rate", "n", "Three components on two-component data",
                              "sample size n", "mean + 2 sd of error"),
    "more-mixtures": FigureSpec("rate", "n", "Over-specified fits, unknown weights",
                                "sample size n", "mean + 2 sd of W2 error"),
    "unknown-weights": FigureSpec("rate", "n", "Unknown-weight fit: two initializations",
                                  "sample size n", "mean + 2 sd of error"),
    "regression-null": FigureSpec("rate", "n", "Regression mixture on null data",
                                  "sample size n", "mean + 2 sd of error"),
    "population-em": FigureSpec("trajectory", "", "Population updates: iterate norm",
                                "iteration", "iterate norm"),
    "two-mixture-pop": FigureSpec("trajectory", "", "Population updates, tied 3-component fit",
                                  "iteration", "error"),
    "pop-likelihood": FigureSpec("curve", "", "Population log-likelihood",
                                 "location parameter", "log-likelihood"),
    "mix-of-reg": FigureSpec("curve", "", "Regression-mixture log-likelihood",
                             "location parameter", "log-likelihood"),
}


def _read_csv(path: str, columns: list[str]) -> list[dict]:
    if not os.path.exists(path):
        raise SchemaError(f"missing input file: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in columns:
            if col not in header:
                raise SchemaError(f"{os.path.basename(path)}: missing column '{col}'")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{os.path.basename(path)}: no data rows")
    return rows


def _series_label(scenario: str) -> str:
    # "snr-null:pi=0.3" -> "pi=0.3"; single-series scenarios keep the id
    return scenario.split(":", 1)[1] if ":" in scenario else scenario


def _render_rate(spec: FigureSpec, fig_dir: str, ax) -> list[str]:
    agg = _read_csv(os.path.join(fig_dir, "aggregate.csv"),
                    ["scenario", "n", "d", "trials", "mean", "std", "report"])
    slopes = _read_csv(os.path.join(fig_dir, "slopes.csv"),
                       ["scenario", "series", "slope", "intercept"])
    annotations = []
    if spec.axis == "n":
        # one line per (series, d); usually a single d
        groups: dict[tuple, list] = {}
        for row in agg:
            groups.setdefault((row["scenario"], row["d"]), []).append(row)
        for (scenario, d), rows in sorted(groups.items()):
            rows.sort(key=lambda r: int(r["n"]))
            xs = [int(r["n"]) for r in rows]
            ys = [float(r["report"]) for r in rows]
            label = _series_label(scenario)
            if len({row["d"] for row in agg}) > 1:
                label += f", d={d}"
            slope_rows = [s for s in slopes
                          if s["scenario"] == scenario and s["series"] == f"vs-n@d={d}"]
            if slope_rows:
                text = f"slope {float(slope_rows[0]['slope']):.2f}"
                label += f" ({text})"
                annotations.append(f"{_series_label(scenario)}|vs-n@d={d}: {text}")
            ax.loglog(xs, ys, marker="o", label=label)
    else:
        groups = {}
        for row in agg:
            groups.setdefault((row["scenario"], row["n"]), []).append(row)
        for (scenario, n), rows in sorted(groups.items(), key=lambda kv: (kv[0][0], int(kv[0][1]))):
            rows.sort(key=lambda r: int(r["d"]))
            xs = [int(r["d"]) for r in rows]
            ys = [float(r["report"]) for r in rows]
            label = f"{_series_label(scenario)}, n={n}"
            slope_rows = [s for s in slopes
                          if s["scenario"] == scenario and s["series"] == f"vs-d@n={n}"]
            if slope_rows:
                text = f"slope {float(slope_rows[0]['slope']):.2f}"
                label += f" ({text})"
                annotations.append(f"{_series_label(scenario)}|vs-d@n={n}: {text}")
            ax.loglog(xs, ys, marker="s", label=label)
    ax.legend(fontsize=8)
    return annotations


def _render_trajectory(spec: FigureSpec, fig_dir: str, ax) -> list[str]:
    rows = _read_csv(os.path.join(fig_dir, "trajectory.csv"),
                     ["scenario", "series", "step", "value"])
    series: dict[str, list] = {}
    for row in rows:
        series.setdefault(row["series"], []).append((int(row["step"]), float(row["value"])))
    for name, pts in sorted(series.items()):
        pts.sort()
        positive = [(s, v) for s, v in pts if v > 0]
        ax.semilogy([s for s, _ in positive], [v for _, v in positive], label=name)
    ax.legend(fontsize=8)
    return []


def _render_curve(spec: FigureSpec, fig_dir: str, ax) -> list[str]:
    rows = _read_csv(os.path.join(fig_dir, "curve.csv"),
                     ["scenario", "series", "x", "value"])
    series: dict[str, list] = {}
    for row in rows:
        series.setdefault(row["series"], []).append((float(row["x"]), float(row["value"])))
    for name, pts in sorted(series.items()):
        pts.sort()
        ax.plot([x for x, _ in pts], [v for _, v in pts], label=name)
    ax.legend(fontsize=8)
    return []


def render(csv_dir: str, figure_id: str, out_path: str) -> dict:
    """Render one figure id from CSVs under csv_dir; write a PNG.

    Returns {"figure", "out", "annotations"}; annotations list the
    slope texts drawn into the legend, verbatim from the slope file.
    """
    if figure_id not in FIGURES:
        raise UnknownFigureError(
            f"unknown figure id {figure_id!r}; valid ids: {', '.join(sorted(FIGURES))}")
    spec = FIGURES[figure_id]
    fig_dir = os.path.join(csv_dir, figure_id)
    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=120)
    try:
        if spec.kind == "rate":
            annotations = _render_rate(spec, fig_dir, ax)
        elif spec.kind == "trajectory":
            annotations = _render_trajectory(spec, fig_dir, ax)
        else:
            annotations = _render_curve(spec, fig_dir, ax)
        ax.set_title(spec.title)
        ax.set_xlabel(spec.xlabel)
        ax.set_ylabel(spec.ylabel)
        ax.grid(True, which="both", alpha=0.3)
        os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
        fig.savefig(out_path)
    finally:
        plt.close(fig)
    return {"figure": figure_id, "out": out_path, "annotations": annotations}
