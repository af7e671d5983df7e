"""Exception types shared across modules."""


class PickError(Exception):
    """Base class for all errors raised by pickmoments."""


class SingularMatrix(PickError, ArithmeticError):
    """A pivot fell below the elimination threshold."""


class NotHermitian(PickError, ValueError):
    """Hermiticity defect exceeds tolerance."""


class NotReal(PickError, ArithmeticError):
    """A quantity that must be real carries a large imaginary part."""


class DegenerateDesign(PickError, ValueError):
    """Least-squares design matrix is rank deficient."""


class OrderTooHigh(PickError, ValueError):
    """Closed form requested beyond its range of validity."""


class InvalidRepresentation(PickError, ValueError):
    """A representation violates one of its invariants.

    The message names the failed invariant.
    """
