# packages/bweibull/quadrature.py
from __future__ import annotations

import warnings
from typing import Callable, Iterable, Optional

import numpy as np
from pydantic import BaseModel
from scipy import integrate

from packages.shared.log import get_logger
from packages.shared.settings import settings

log = get_logger(__name__)


class QuadratureResult(BaseModel):
    value: float
    abserr: float
    converged: bool


def _pieces(lower: float, upper: float, breakpoints: Iterable[float]) -> list[tuple[float, float]]:
    inner = sorted({float(b) for b in breakpoints if lower < b < upper and np.isfinite(b)})
    edges = [lower, *inner, upper]
    return list(zip(edges[:-1], edges[1:]))


def integrate_scalar(
    func: Callable[[float], float],
    lower: float = 0.0,
    upper: float = np.inf,
    *,
    breakpoints: Iterable[float] = (),
    epsabs: Optional[float] = None,
    epsrel: Optional[float] = None,
    limit: Optional[int] = None,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod (QUADPACK) over [lower, upper], split at breakpoints.

    An infinite upper end is handled by QUADPACK's mapped rule on the last piece.
    """
    epsabs = settings.QUAD_EPSABS if epsabs is None else epsabs
    epsrel = settings.QUAD_EPSREL if epsrel is None else epsrel
    limit = settings.QUAD_LIMIT if limit is None else limit

    total, err, ok = 0.0, 0.0, True
    for a, b in _pieces(lower, upper, breakpoints):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", integrate.IntegrationWarning)
            val, e = integrate.quad(func, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit)
        if any(issubclass(w.category, integrate.IntegrationWarning) for w in caught):
            ok = False
        total += val
        err += e
    if not ok or not np.isfinite(total):
        log.debug("quad.unconverged", lower=lower, upper=upper, value=total, abserr=err)
    return QuadratureResult(value=total, abserr=err, converged=ok and bool(np.isfinite(total)))


def integrate_vector(
    func: Callable[[float], np.ndarray],
    lower: float = 0.0,
    upper: float = np.inf,
    *,
    breakpoints: Iterable[float] = (),
    epsabs: Optional[float] = None,
    epsrel: Optional[float] = None,
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Vector-valued counterpart of integrate_scalar built on quad_vec."""
    epsabs = settings.QUAD_EPSABS if epsabs is None else epsabs
    epsrel = settings.QUAD_EPSREL if epsrel is None else epsrel

    total, err, ok = None, None, True
    for a, b in _pieces(lower, upper, breakpoints):
        val, e, info = integrate.quad_vec(func, a, b, epsabs=epsabs, epsrel=epsrel, full_output=True)
        if getattr(info, "status", 0) != 0:
            ok = False
        total = val if total is None else total + val
        err = e if err is None else err + e
    total = np.asarray(total, dtype=float)
    if not ok or not np.all(np.isfinite(total)):
        log.debug("quad_vec.unconverged", lower=lower, upper=upper)
        ok = False
    return total, np.asarray(err, dtype=float), ok
