class NegadepError(Exception):
    pass


class NonPrimeBase(NegadepError, ValueError):
    pass


class DimensionExceedsBase(NegadepError, ValueError):
    pass


class InsufficientDigits(NegadepError, ValueError):
    pass


class BaseMismatch(NegadepError, ValueError):
    pass


class EmptyInterval(NegadepError, ValueError):
    pass


class NotAnchored(NegadepError, ValueError):
    pass


class AnchoredInterval(NegadepError, ValueError):
    """Interval touches a cell boundary in a way that only the anchored path handles."""


class FullInterval(AnchoredInterval):
    pass


class MalformedRegion(NegadepError, ValueError):
    pass


class EmptyFamily(NegadepError, ValueError):
    pass


class BadIndices(NegadepError, ValueError):
    pass


class DecompositionError(NegadepError, ArithmeticError):
    """Raised if a decomposition cannot be completed (would indicate a broken invariant)."""


class NotAVerifiedNet(UserWarning):
    """Warning category: the point set failed the (0,m,s)-net check."""
