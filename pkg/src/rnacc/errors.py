"""Exception hierarchy shared across the package.

Everything derives from :class:`RnaError` so callers can catch one base
class. I/O failures are not wrapped; they surface as the builtin
``OSError``.
"""


class RnaError(Exception):
    """Base class for all errors raised by this package."""


class InvalidConfig(RnaError, ValueError):
    """A configuration value violates its documented constraints."""


class WindowTooSmall(RnaError):
    """Fewer than two iterates: no residual can be formed."""


class DimensionMismatch(RnaError):
    """Vectors or coefficient lengths do not agree."""


class OrderingViolation(RnaError):
    """Epoch tags pushed into a buffer must be strictly increasing."""


class SingularSystem(RnaError):
    """The regularized Gram system could not be factorized.

    Raised when ``lam == 0`` and the residual Gram matrix is rank
    deficient (for example after duplicated consecutive iterates), or
    when even the one-shot trace-scaled bump cannot restore positive
    definiteness. Use ``lam > 0``.
    """


class DegenerateSum(RnaError):
    """The raw solution sums to (numerically) zero.

    The affine combination is undefined in this case; a larger ``lam``
    usually removes the cancellation.
    """


class NumericalFailure(RnaError):
    """Non-finite values where finite numbers are required."""


class FormatError(RnaError):
    """A checkpoint file does not conform to the binary layout."""
