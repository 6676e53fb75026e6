"""Exception types shared across the package.

Everything derives from ValueError so callers that only care about
"bad input" can catch one class, while the CLI and tests can still
distinguish the reasons.
"""


class SegsafeError(ValueError):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(SegsafeError):
    """Two grids that must share a shape (or class count) do not."""


class UndefinedMetricError(SegsafeError):
    """A metric's denominator is empty; the value is undefined, not 0 or 1."""


class ConfigError(SegsafeError):
    """A configuration value is out of range or inconsistent with the image."""


class MaskFormatError(SegsafeError):
    """A label raster cannot be decoded into a valid label map."""
