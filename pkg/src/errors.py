# src/errors.py

"""
Exception hierarchy shared by every stage of the pipeline.

Value-type problems (bad distributions, out-of-range lengths, mismatched
shapes, bad configuration) also subclass ValueError so callers that only
care about "bad input" can catch that.
"""


class AssemblyLabError(Exception):
    """Base class for all errors raised by this project."""


class DistributionError(AssemblyLabError, ValueError):
    """A probability vector or channel row is negative or does not sum to 1."""


class RangeError(AssemblyLabError, ValueError):
    """A length, count or rate lies outside its admissible range."""


class ShapeError(AssemblyLabError, ValueError):
    """Sequences or matrices have incompatible lengths."""


class ConfigError(AssemblyLabError, ValueError):
    """A configuration file or trial configuration is inconsistent."""


class FileFormatError(AssemblyLabError):
    """An input file does not follow the expected layout."""


class TypicalityError(AssemblyLabError):
    """A typicality test was requested in a form that cannot be evaluated."""


class EvaluationUnavailableError(AssemblyLabError):
    """Ground truth needed for an evaluation is missing."""


class EstimateUnavailableError(AssemblyLabError):
    """A sweep does not contain the cells needed for an estimate."""
