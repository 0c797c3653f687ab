"""Exception types raised across the package."""


class VarfamError(Exception):
    """Base class for package errors."""


class DomainError(VarfamError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class PoleError(DomainError):
    """A parameter hits a pole of the requested function."""


class InvariantError(VarfamError, ValueError):
    """Constructor parameters violate a structural invariant."""


class DegenerateCaseError(InvariantError):
    """A parameter value selects a degenerate case that is not implemented."""


class PositivityError(VarfamError, ValueError):
    """A weight that must be nonnegative is negative; ``witness`` holds the offending point."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NonConvergenceError(VarfamError, ArithmeticError):
    """A quadrature or series did not reach its tolerance within the iteration cap."""


class InsufficientOrderError(VarfamError, ValueError):
    """Not enough series coefficients or recurrence rows for the requested order."""
