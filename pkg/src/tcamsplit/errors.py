"""Exception types raised across the package.

Every error derives from :class:`TcamError` (itself a ``ValueError``), so
callers can catch input problems with a single ``except`` clause.
"""


class TcamError(ValueError):
    pass


class NonPositiveWeight(TcamError):
    pass


class SumNotPowerOfTwo(TcamError):
    pass


class WidthMismatch(TcamError):
    pass


class InsufficientWeight(TcamError):
    pass


class OutOfRange(TcamError):
    pass


class UnmatchedAddress(TcamError):
    pass


class UnrealizableSequence(TcamError):
    pass


class NonSegmentedInput(TcamError):
    pass


class WidthCapExceeded(TcamError):
    pass


class TooManyPermutations(TcamError):
    pass


class NotOptimalInput(TcamError):
    pass


class InvalidKW(TcamError):
    pass


class MultipleZeroTargets(TcamError):
    pass


class NotMinimalColoring(TcamError):
    pass


class BadTargetIds(TcamError):
    pass


class BadK(TcamError):
    pass


class StateSpaceTooLarge(TcamError):
    pass


class BudgetExceeded(TcamError):
    pass


class InvariantViolation(RuntimeError):
    """An internal consistency check failed (a bug, not bad input)."""
