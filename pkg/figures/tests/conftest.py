import csv
import math
import os

import pytest

RATE_N_IDS = ["snr-strong", "snr-null", "more-cases", "two-mixture",
              "more-mixtures", "unknown-weights", "regression-null"]
RATE_D_IDS = ["unbalanced-rates", "sample-balanced-rates"]
TRAJECTORY_IDS = ["population-em", "two-mixture-pop"]
CURVE_IDS = ["pop-likelihood", "mix-of-reg"]

N_GRID = [100, 316, 1000, 3162]
D_GRID = [1, 4, 16, 64]


def _write(path, header, rows):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def build_golden(root):
    """Synthetic inputs for every figure id: exact power laws and curves."""
    for fid in RATE_N_IDS:
        series = [f"{fid}:pi=0.3", f"{fid}:pi=0.5"]
        slopes = [-0.5, -0.25]
        agg, slope_rows = [], []
        for scenario, slope in zip(series, slopes):
            for n in N_GRID:
                report = 3.0 * n**slope
                agg.append([scenario, n, 1, 25, report / 2, report / 4, report])
            slope_rows.append([scenario, "vs-n@d=1", slope, math.log(3.0)])
        _write(os.path.join(root, fid, "aggregate.csv"),
               ["scenario", "n", "d", "trials", "mean", "std", "report"], agg)
        _write(os.path.join(root, fid, "slopes.csv"),
               ["scenario", "series", "slope", "intercept"], slope_rows)
    for fid in RATE_D_IDS:
        scenario = f"{fid}:pi=0.3"
        agg, slope_rows = [], []
        for n in (1600, 12800):
            for d in D_GRID:
                report = 2.0 * (d / n) ** 0.5
                agg.append([scenario, n, d, 25, report / 2, report / 4, report])
            slope_rows.append([scenario, f"vs-d@n={n}", 0.5, math.log(2.0 / n**0.5)])
        _write(os.path.join(root, fid, "aggregate.csv"),
               ["scenario", "n", "d", "trials", "mean", "std", "report"], agg)
        _write(os.path.join(root, fid, "slopes.csv"),
               ["scenario", "series", "slope", "intercept"], slope_rows)
    for fid in TRAJECTORY_IDS:
        rows = []
        for series, rate in [("pi=0.3", 0.92), ("pi=0.5", 0.99)]:
            rows.extend([fid, series, t, rate**t] for t in range(50))
        _write(os.path.join(root, fid, "trajectory.csv"),
               ["scenario", "series", "step", "value"], rows)
    for fid in CURVE_IDS:
        rows = []
        for series, curvature in [("pi=0.3", 0.16), ("pi=0.5", 0.02)]:
            rows.extend([fid, series, x / 10.0, -curvature * (x / 10.0) ** 2]
                        for x in range(-20, 21))
        _write(os.path.join(root, fid, "curve.csv"),
               ["scenario", "series", "x", "value"], rows)


@pytest.fixture(scope="session")
def golden_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("golden")
    build_golden(str(root))
    return str(root)
