"""Render em-lab experiment CSVs into the standard figure set.

This package talks to the experiment harness only through its CSV
files (trials/aggregate/slopes for rate scenarios, trajectory and
curve files otherwise); it never recomputes statistics, and slope
annotations are read from the slope file, never re-fit.
"""

from .render import FIGURES, SchemaError, UnknownFigureError, render

__version__ = "0.1.0"

__all__ = ["render", "FIGURES", "SchemaError", "UnknownFigureError", "__version__"]
