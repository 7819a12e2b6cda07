"""Exception and warning types shared across the package."""


class EllipticalError(Exception):
    """Base class for all errors raised by :mod:`ellnorm`."""


class MatrixError(EllipticalError, ValueError):
    """Shape matrix is not square, not symmetric or not positive semi-definite."""


class MDAMismatchError(EllipticalError, ValueError):
    """Operation requires a radial law from a different max-domain of attraction."""


class PreconditionError(EllipticalError, ValueError):
    """An operation precondition (e.g. ``delta * tau == 1``) does not hold."""


class AsymptoticWarning(UserWarning):
    """The first-order expansion is evaluated outside its reliable range."""
