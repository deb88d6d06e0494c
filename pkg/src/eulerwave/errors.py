"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: configuration/usage/domain problems are
exit 2, numeric failures (NaN, blowup where none was expected) are exit 3.
"""


class EulerwaveError(Exception):
    """Base class for all package errors."""


class ConfigurationError(EulerwaveError):
    """Invalid model parameters or malformed run configuration."""


class DomainError(EulerwaveError):
    """Inputs outside the mathematical domain (non-finite, c <= 0, ...)."""


class UsageError(EulerwaveError):
    """API misuse: bad axis, insufficient slices, unresolvable wavenumber."""


class NumericError(EulerwaveError):
    """Numerical failure: singular solve, non-convergent iteration."""


class BlowupError(NumericError):
    """NaN/Inf detected during evolution (expected near shock times)."""


class PostBlowupError(EulerwaveError):
    """Simple-wave fan queried at or beyond its blowup time."""
