"""Exception and warning types raised across the package."""


class SsdfolioError(Exception):
    """Base class for all package errors."""


class DataError(SsdfolioError):
    """Input data is malformed or cannot support the requested operation."""


class NonPositivePrice(DataError):
    pass


class GapRemaining(DataError):
    pass


class EmptyUniverse(DataError):
    pass


class EmptySector(DataError):
    pass


class WindowOutOfRange(DataError):
    pass


class NoRatioData(DataError):
    pass


class LengthMismatch(DataError):
    pass


class DegenerateColumn(DataError):
    pass


class DataTooShort(DataError):
    pass


class PhaseOutOfRange(DataError):
    pass


class EigDecompositionFailure(SsdfolioError):
    pass


class SolverError(SsdfolioError):
    """An optimization model could not be solved to optimality."""

    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status


class InfeasibleError(SolverError):
    pass


class SupportTooSmall(SolverError):
    pass


class ZeroDenominator(ArithmeticError, SsdfolioError):
    pass


class ConfigError(SsdfolioError):
    pass


class RankDeficientWarning(UserWarning):
    pass


class SectorTooSmall(UserWarning):
    """A sector is too small for the per-asset cap; the cap was relaxed."""


class FeasibilityWarning(UserWarning):
    pass
