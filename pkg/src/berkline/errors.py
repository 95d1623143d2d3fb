"""Exception hierarchy shared by all modules."""


class BerklineError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BerklineError, ArithmeticError):
    """Arithmetic on the extended value group left the group (e.g. inf - inf)."""


class ZeroPolynomial(BerklineError, ValueError):
    pass


class ConstantPolynomial(BerklineError, ValueError):
    pass


class NotSplit(BerklineError):
    """A polynomial that had to split over Q into linear factors did not."""

    def __init__(self, message, remainder_degree=None):
        super().__init__(message)
        self.remainder_degree = remainder_degree


class DivisorTooSmall(BerklineError, ValueError):
    pass


class MissingInfinity(BerklineError, ValueError):
    pass


class InadmissibleDivisor(BerklineError, ValueError):
    pass


class NonIntegerSlope(BerklineError, ValueError):
    pass


class InvalidProfile(BerklineError, ValueError):
    pass


class ClippedTuple(BerklineError, ValueError):
    pass


class DirectionOutsideBall(BerklineError, ValueError):
    pass


class NonConstantEdgeSlope(BerklineError):
    pass


class DegreeTooLarge(BerklineError, ValueError):
    pass


class NoRationalRepresentative(BerklineError, ValueError):
    pass


class DegenerateAt(BerklineError):
    def __init__(self, sample, message="degree drops"):
        super().__init__(f"degenerate at s={sample}: {message}")
        self.sample = sample


class SchemaError(BerklineError, ValueError):
    pass
