"""Exception types shared across the package."""


class ProlateError(Exception):
    """Base class for all package errors."""


class DomainError(ProlateError, ValueError):
    """Argument outside the domain where the requested quantity is real/defined."""


class AdmissibilityError(ProlateError, ValueError):
    """Mode/parameter combination outside the admissible asymptotic band."""


class ConvergenceError(ProlateError, ArithmeticError):
    """An iterative or series computation failed to converge."""


class OverflowRangeError(ProlateError, OverflowError):
    """Result exceeds the double-precision exponent range; use a scaled/log form."""
