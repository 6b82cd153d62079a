"""Exception hierarchy shared by all modules.

Input/shape problems raise :class:`InputError`; numerical impossibilities
(degenerate spectra, undefined estimators, out-of-domain parameters) raise
subclasses of :class:`NumericalError`. The CLI maps the former to exit
code 2 and the latter to exit code 3.
"""


class OcrepError(Exception):
    """Base class for all library errors."""


class InputError(OcrepError, ValueError):
    """Malformed input: bad shapes, non-finite entries, unknown options."""


class NumericalError(OcrepError, ValueError):
    """A computation is undefined or unstable for the given values."""


class DomainError(NumericalError):
    """A scalar parameter is outside its mathematical domain."""


class DegenerateMatrixError(NumericalError):
    """All singular values are zero (or below threshold)."""


class EstimatorError(NumericalError):
    """A ridge-parameter estimator is undefined for the given data."""


class UnsupportedStrategyError(InputError):
    """The selection strategy does not apply to this task/target shape."""
