"""Exception hierarchy shared by all logheat modules."""


class LogheatError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(LogheatError):
    """Invalid input data (bad weights, nonpositive variances, ...)."""


class DomainError(LogheatError):
    """A closed-form bound was requested outside its validity region."""


class CapabilityError(LogheatError):
    """The measure does not support the requested operation."""


class NumericalError(LogheatError):
    """A numerical routine produced or encountered non-finite values."""


class BracketError(LogheatError):
    """Root bracket does not contain a sign change."""


class PreconditionError(LogheatError):
    """A verified hypothesis (e.g. a Hessian lower bound on a grid) fails."""


class SearchError(LogheatError):
    """A certificate search ran out of bracket or truncation budget."""
