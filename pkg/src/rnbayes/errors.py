"""Exception hierarchy shared by all modules."""


class RNBayesError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(RNBayesError, ValueError):
    """Arguments violate a documented precondition."""


class DomainError(InvalidInputError):
    """Distribution or special-function arguments outside their domain."""


class BoundaryCaseError(DomainError):
    """A GIG triple sits on a boundary the operation cannot handle."""


class UnsupportedMomentError(DomainError):
    """Bessel-ratio moments requested for a boundary GIG triple."""


class ImproperPriorError(InvalidInputError):
    """A flat (improper) prior was used where a proper one is required."""


class UnsupportedModelError(InvalidInputError):
    """The requested model/prior combination is not supported."""


class DataError(RNBayesError, ValueError):
    """Input data is malformed.  ``row`` is the 1-based data row, if known."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class NumericError(RNBayesError, ArithmeticError):
    """A numerical procedure failed (no root, zero mass, degenerate evidence)."""


class GibbsRunError(NumericError):
    """The Gibbs sampler hit an invalid conditional at ``iteration``."""

    def __init__(self, message, iteration):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration
