"""Exception types raised by the package."""


class DegenerateSignalError(ValueError):
    """Signal has zero average power, so normalized quantities are undefined."""


class NumericalFailure(ArithmeticError):
    """A series or quadrature did not reach its requested tolerance."""
