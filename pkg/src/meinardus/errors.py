"""Exception types shared across the package.

``PreconditionError`` marks a domain precondition that the inputs fail
(the CLI maps it to exit status 3); everything derives from ``ValueError``.
"""


class PreconditionError(ValueError):
    pass


class MissingMetaError(PreconditionError):
    """The weight sequence carries no Dirichlet metadata."""


class IntegralityError(PreconditionError):
    """A weight that must be a nonnegative integer is not."""


class UnsolvableSaddleError(PreconditionError):
    """E Z_n(delta) = n has no positive root for these weights."""


class LogOfZeroError(PreconditionError):
    """Requested the logarithm of a zero count."""
