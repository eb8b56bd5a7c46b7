"""Exception types shared across the package."""


class TodaMirrorError(Exception):
    """Base class for all package errors."""


class UnsupportedTypeError(TodaMirrorError):
    """Requested Cartan type / rank outside the supported scope."""


class NonReducedWordError(TodaMirrorError):
    """A word that must be reduced fails the length check."""


class DimensionCapError(TodaMirrorError):
    """Representation construction exceeded the configured dimension cap."""


class FactorizationError(TodaMirrorError):
    """Unipotent factorization or Gaussian decomposition failed.

    Carries the residual (or offending minor magnitude) of the last step
    so callers can tell an off-chart point from a numerical problem.
    """

    def __init__(self, message, residual=None, index=None):
        super().__init__(message)
        self.residual = residual
        self.index = index


class OffFiberError(TodaMirrorError):
    """A point left the mirror fiber chart (vanishing principal minor)."""


class SingularParameterError(TodaMirrorError):
    """Parameter hit a pole of a closed-form factorization identity."""


class QuadratureError(TodaMirrorError):
    """Quadrature aborted; some nodes failed the fiber invariant."""

    def __init__(self, message, failures=0):
        super().__init__(message)
        self.failures = failures
