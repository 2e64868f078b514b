"""Exception types raised across the package."""


class EscherPosError(Exception):
    """Base class for all package errors."""


class InvalidAreaSequence(EscherPosError, ValueError):
    pass


class IndexOutOfRange(EscherPosError, IndexError):
    pass


class WeightTooLarge(EscherPosError, ValueError):
    pass


class TooLarge(EscherPosError, ValueError):
    pass


class NotAnEscher(EscherPosError, ValueError):
    pass


class NotDisjoint(EscherPosError, ValueError):
    pass


class InvalidInsertionPoint(EscherPosError, ValueError):
    pass


class NoSplittingPoint(EscherPosError, ValueError):
    pass


class UnsupportedArity(EscherPosError, ValueError):
    pass


class UnsupportedLength(EscherPosError, ValueError):
    pass


class NonIntegralResult(EscherPosError, ArithmeticError):
    """A coefficient that must be an integer came out fractional."""


class LayoutMismatch(EscherPosError, ValueError):
    pass


class LengthMismatch(EscherPosError, ValueError):
    pass


class EmptyWhitelist(EscherPosError, ValueError):
    pass


class MissingDataset(EscherPosError, FileNotFoundError):
    pass


class InvalidConfig(EscherPosError, ValueError):
    pass
