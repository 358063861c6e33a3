"""Exception hierarchy shared by all modules."""


class GmrfError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(GmrfError, ValueError):
    """An input value is non-finite or otherwise malformed."""


class DomainError(GmrfError, ValueError):
    """A parameter or shape lies outside the mathematical domain."""


class DivergenceError(GmrfError, RuntimeError):
    """The MCMC chain left the stable regime.

    Attributes:
        sweep: index of the sweep (1-based) at which divergence was detected,
            or None when unknown.
    """

    def __init__(self, message, sweep=None):
        super().__init__(message)
        self.sweep = sweep


class NumericalError(GmrfError, RuntimeError):
    """A numerical operation failed (singular matrix, overflow, ...)."""
