"""EM for over-specified Gaussian location mixtures.

Library layout:

* `quadrature`    deterministic 1-D/2-D Gaussian expectations
* `models`        data-generating laws, fit specifications, seeded sampling
* `em_population` infinite-sample update operators (radial reduction)
* `em_sample`     sample update operators and full EM runs
* `fixedpoint`    univariate fixed-point structure of the sample operator
* `theory`        contraction envelopes, epoch schedule, curvature, bounds
* `metrics`       W2 over mixing measures, slope fits, trial aggregation
* `harness`       seeded Monte-Carlo scenario runner and CSV persistence
* `scenarios`     built-in experiment definitions, one per figure
* `cli`           `em-lab` command-line interface
"""

__version__ = "0.1.0"

from .errors import ConfigError, EmLabError, NumericError

__all__ = ["ConfigError", "EmLabError", "NumericError", "__version__"]
