# packages/bweibull/errors.py
from __future__ import annotations

from typing import Optional


class BWeibullError(RuntimeError):
    pass


class DomainError(BWeibullError, ValueError):
    """Argument outside the domain of the operation."""


class ConvergenceError(BWeibullError):
    pass


class SeriesDivergenceError(ConvergenceError):
    def __init__(self, message: str, *, terms: int = 0):
        super().__init__(message)
        self.terms = terms


class UnsupportedRegionError(BWeibullError):
    pass


class DivergenceError(BWeibullError):
    pass


class TailEvaluationError(BWeibullError):
    pass


class DatasetError(BWeibullError, ValueError):
    def __init__(self, message: str, *, path: Optional[str] = None, line: Optional[int] = None):
        where = ""
        if path:
            where = f"{path}"
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.line = line
        self.reason = message


class FitError(BWeibullError):
    pass


class OptimizationError(FitError):
    pass


class GofError(BWeibullError):
    pass
