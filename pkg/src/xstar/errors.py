"""Exception types raised by xstar."""


class XStarError(Exception):
    """Base class for all library errors."""


class DomainError(XStarError, ValueError):
    """Input outside the domain of an operation (non-finite values, bad shapes)."""


class UnsupportedOperation(XStarError):
    """Operation not defined for this integrand, e.g. recession of a superlinear g."""


class ConvergenceError(XStarError):
    """An inner iterative procedure failed to reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class AlignmentError(XStarError, ValueError):
    """Translation vector is not a whole number of grid steps."""


class ConfigError(XStarError, ValueError):
    """Invalid solver or run configuration."""
