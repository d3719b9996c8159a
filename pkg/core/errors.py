"""
Errors raised by the sensing pipeline
"""

from typing import Optional, Tuple


class SensingError(Exception):
    """Base class for every error raised by the sensing modules"""


class ParameterError(SensingError, ValueError):
    """A size, range or count is outside what the operation accepts"""


class ShapeError(SensingError, ValueError):
    """Sample lengths or matrix shapes do not line up"""


class QuantizationStateError(SensingError):
    """Samples were handed to a quantizer a second time"""


class UndefinedGainError(SensingError, ZeroDivisionError):
    """The Bussgang gain of an all-zero input does not exist"""


class DecompositionError(SensingError):
    """The Hermitian eigensolver did not converge"""


class RankDeficiencyError(SensingError):
    """SOMP picked a set of dictionary columns that is not full rank"""

    def __init__(self, message: str, partial_support: Tuple[int, ...] = ()):
        super().__init__(message)
        self.partial_support = tuple(partial_support)


class TrialError(SensingError):
    """Wraps a failure inside one Monte Carlo trial"""

    def __init__(self, message: str, trial_index: int, cell_index: Optional[int] = None):
        where = f"trial {trial_index}" if cell_index is None else f"cell {cell_index}, trial {trial_index}"
        super().__init__(f"{where}: {message}")
        self.trial_index = trial_index
        self.cell_index = cell_index
