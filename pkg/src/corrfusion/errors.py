"""Exception types shared across the package.

Everything a user can fix (bad files, shapes, labels, options) derives from
ValidationError; failures inside numerical routines raise NumericError. The
CLI maps these to exit codes 2 and 3 respectively.
"""


class CorrFusionError(Exception):
    """Base class for all package errors."""


class ValidationError(CorrFusionError, ValueError):
    """Bad user input: files, shapes, labels, or configuration."""


class ParseError(ValidationError):
    """A cell or line in an input file could not be parsed."""


class AlignmentError(ValidationError):
    """Sample counts disagree across modalities or with the labels."""


class LabelError(ValidationError):
    """Label values do not form a usable class structure."""


class DimensionError(ValidationError):
    """Matrix or vector dimensions do not match."""


class ConfigError(ValidationError):
    """Invalid option value or method/modality-count mismatch."""


class NumericError(CorrFusionError, RuntimeError):
    """A numerical routine failed (factorization, ill-posed problem)."""
