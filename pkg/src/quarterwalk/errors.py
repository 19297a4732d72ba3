"""Exception hierarchy shared by every module of the package."""


class WalkError(Exception):
    """Base class for all errors raised by quarterwalk."""


class ParseError(WalkError, ValueError):
    """A step set or command-line value could not be parsed."""


class DomainError(WalkError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateModelError(DomainError):
    """The step set is half-plane reducible; the analytic pipeline does not apply."""


class SingularModelError(DomainError):
    """The operation is undefined for (or reserved to) singular models."""


class RegionError(DomainError):
    """A point is outside the region where the representation is used."""


class NumericError(WalkError, ArithmeticError):
    """Base class for numerical failures (quadrature, branches, poles, searches)."""


class AccuracyError(NumericError):
    """A quadrature or iteration did not reach the requested accuracy."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class PoleError(NumericError):
    """The evaluation point is at (or numerically on top of) a pole."""


class BranchError(NumericError):
    """No representative exists on the requested branch."""


class SearchError(NumericError):
    """A search for admissible auxiliary points failed."""
