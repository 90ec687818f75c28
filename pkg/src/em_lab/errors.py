"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should
raise the most specific one that applies.
"""


class EmLabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(EmLabError, ValueError):
    """Invalid inputs, options, or experiment configuration."""


class NumericError(EmLabError, ArithmeticError):
    """A numeric computation cannot proceed (singular system, bad integrand, ...)."""
