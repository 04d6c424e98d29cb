"""Exception types shared across the package."""


class CnoidalError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CnoidalError, ValueError):
    """Argument outside the domain of an elliptic function or integral."""


class DivergenceError(DomainError):
    """K(m) diverges (m = 1, or too close to 1 for a lattice)."""


class UsageError(CnoidalError, ValueError):
    """Illegal combination of arguments (family/p, lattice mismatch, ...)."""


class DegenerateSamplingError(CnoidalError, RuntimeError):
    """Too few usable sample arguments to pin down an identity constant."""


class NonIdentityError(CnoidalError, RuntimeError):
    """A sampled identity ratio is not constant within tolerance."""

    def __init__(self, message, constant=None):
        super().__init__(message)
        self.constant = constant
