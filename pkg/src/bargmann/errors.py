"""Exception types shared across the package."""


class BargmannError(Exception):
    """Base class for all errors raised by :mod:`bargmann`."""


class ParameterError(BargmannError, ValueError):
    """Invalid family parameters or numerical settings."""


class DomainError(BargmannError, ValueError):
    """Argument outside the domain where a quantity is defined."""


class UnclassifiableError(BargmannError):
    """The spectrum type cannot be decided inside the scan window."""


class UndecidedError(BargmannError):
    """Coherent-state problem with r1 == r2, which is not treated."""


class ConvergenceError(BargmannError, ArithmeticError):
    """A series or quadrature did not reach the requested tolerance."""


class NoClosedFormError(BargmannError):
    """No catalogued weight function exists for the requested family."""


class UnsupportedError(BargmannError):
    """Operation not available for this family."""
