"""Exception types shared across the package."""


class DecoboundError(Exception):
    """Base class for all package errors."""


class InvalidStateError(DecoboundError, ValueError):
    """Raised when a matrix or probability vector is not a valid state."""


class DomainError(DecoboundError, ValueError):
    """Raised when a scalar argument lies outside the domain of a function."""


class NotFalsifiableError(DomainError):
    """A decoherence value that no observable CHSH value can rule out."""


class ConvergenceError(DecoboundError, RuntimeError):
    """A numerical search failed to reach its stated accuracy."""


class LpError(DecoboundError, RuntimeError):
    """A linear program was infeasible or unbounded where an optimum was required."""
