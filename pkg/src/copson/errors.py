"""Exception hierarchy shared by all modules."""


class CopsonError(Exception):
    """Base class for every error raised by this package."""


class WeightParseError(CopsonError, ValueError):
    pass


class NonIntegrableNearZero(CopsonError):
    """A weight integral starting at 0 diverges (power exponent <= -1 active at 0)."""


class DegenerateAtPoint(CopsonError):
    pass


class TargetNotBracketed(CopsonError):
    pass


class LevelSolveFailed(CopsonError):
    pass


class NotAdmissible(CopsonError):
    def __init__(self, status, witness=None):
        msg = f"weights are not admissible: {status}"
        if witness is not None:
            msg += f" (witness t={witness:g})"
        super().__init__(msg)
        self.status = status
        self.witness = witness


class IndexOutOfWindow(CopsonError, IndexError):
    pass


class SupportNotCovered(CopsonError):
    pass


class NotGeometric(CopsonError, ValueError):
    pass


class DegenerateB(CopsonError, ValueError):
    pass


class ConditionInfinite(CopsonError):
    pass


class DegenerateDenominator(CopsonError):
    pass
