"""Exception types shared across the package.

The CLI maps these onto its exit-code scheme, so library code should
raise the most specific class that applies.
"""


class ConfigError(ValueError):
    """Invalid configuration value or malformed config document."""


class DimensionError(ConfigError):
    """Inputs whose shapes or channel counts do not line up."""


class EmptyResultError(ConfigError):
    """An operation removed every trial, leaving nothing to work with."""


class FormatError(IOError):
    """A binary or text payload does not match its declared format."""


class SingularCovarianceError(ArithmeticError):
    """Covariance matrix is numerically singular; a nonzero shrinkage is needed."""
