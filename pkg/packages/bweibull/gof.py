# packages/bweibull/gof.py
"""Kolmogorov–Smirnov and Cramér–von Mises goodness of fit.

Two conventions are reported side by side:

* standard: one-sample tests of the data against the fitted CDF;
* published: two-sample tests between the ECDF values at the data points and the
  fitted CDF values at the same points. Ties in the CVM ranks are broken by
  order of appearance, and the CVM p-value is taken as exp(−T)/6. This is the
  convention behind the published KS/CVM tables.
"""
from __future__ import annotations

from typing import Callable, List, Tuple, Union

import numpy as np
from scipy import stats

from packages.bweibull.dist import ArrayLike, CdfModel
from packages.bweibull.errors import DomainError, GofError
from packages.bweibull.models import Convention, GofResult
from packages.shared.log import get_logger

log = get_logger(__name__)

CdfLike = Union[CdfModel, Callable[[np.ndarray], ArrayLike]]

# R's two-sample ks.test switches to the limiting distribution at this n·m
_EXACT_KS_LIMIT = 10000


class EmpiricalCdf:
    """Right-continuous step function with jump k/n at a value observed k times."""

    def __init__(self, data: ArrayLike):
        x = np.sort(np.asarray(data, dtype=float).ravel())
        if x.size == 0:
            raise DomainError("ECDF of empty data")
        if not np.all(np.isfinite(x)):
            raise DomainError("ECDF data must be finite")
        self.points = x
        self.n = x.size

    def __call__(self, t: ArrayLike) -> ArrayLike:
        vals = np.searchsorted(self.points, np.asarray(t, dtype=float), side="right") / self.n
        return float(vals) if np.ndim(vals) == 0 else vals


def ecdf(data: ArrayLike) -> EmpiricalCdf:
    return EmpiricalCdf(data)


def _cdf_fn(cdf: CdfLike) -> Callable[[np.ndarray], np.ndarray]:
    fn = cdf.cdf if isinstance(cdf, CdfModel) else cdf
    return lambda t: np.asarray(fn(np.asarray(t, dtype=float)), dtype=float)


def _sorted(data: ArrayLike) -> np.ndarray:
    x = np.sort(np.asarray(data, dtype=float).ravel())
    if x.size == 0:
        raise DomainError("goodness of fit needs at least one observation")
    return x


def _fitted_values(x_sorted: np.ndarray, cdf: CdfLike) -> np.ndarray:
    f = np.broadcast_to(_cdf_fn(cdf)(x_sorted), x_sorted.shape)
    if not np.all(np.isfinite(f)) or np.any((f < 0) | (f > 1)):
        raise GofError("CDF values must lie in [0, 1]")
    if np.any(np.diff(f) < -1e-12):
        raise GofError("CDF evaluations are not monotone in the data")
    return np.array(f)


# ---------- Kolmogorov–Smirnov ----------

def _ecdf_values_ks(emp: np.ndarray, fitted: np.ndarray) -> Tuple[float, float, str]:
    n, m = emp.size, fitted.size
    d = float(stats.ks_2samp(emp, fitted, method="asymp").statistic)
    combined = np.concatenate([emp, fitted])
    ties = np.unique(combined).size < combined.size
    if n * m < _EXACT_KS_LIMIT and not ties:
        return d, float(stats.ks_2samp(emp, fitted, method="exact").pvalue), "exact"
    en = np.sqrt(n * m / (n + m))
    return d, float(stats.kstwobign.sf(en * d)), "asymptotic"


def ks_test(data: ArrayLike, cdf: CdfLike, convention: Convention = Convention.STANDARD) -> Tuple[float, float, str]:
    """(D, p-value, method)."""
    convention = Convention(convention)
    x = _sorted(data)
    fitted = _fitted_values(x, cdf)
    if convention == Convention.PUBLISHED:
        return _ecdf_values_ks(ecdf(x)(x), fitted)
    res = stats.kstest(x, _cdf_fn(cdf), method="asymp")
    return float(res.statistic), float(res.pvalue), "asymptotic"


# ---------- Cramér–von Mises ----------

def published_cvm_pvalue(t: float) -> float:
    return float(np.exp(-t) / 6.0)


def cvm_2samp_ordinal(x: ArrayLike, y: ArrayLike) -> float:
    """Two-sample Cramér-von Mises statistic with stable ordinal ranks.

    Ties in the pooled sample are ranked in order of appearance, x before y,
    instead of sharing a midrank.
    """
    xs = np.sort(np.asarray(x, dtype=float), kind="stable")
    ys = np.sort(np.asarray(y, dtype=float), kind="stable")
    n, m = xs.size, ys.size
    if n == 0 or m == 0:
        raise GofError("both samples must be non-empty")
    pooled = stats.rankdata(np.concatenate([xs, ys]), method="ordinal")
    u = n * np.sum((pooled[:n] - np.arange(1, n + 1)) ** 2) + m * np.sum((pooled[n:] - np.arange(1, m + 1)) ** 2)
    total = n + m
    return float(u / (n * m * total) - (4.0 * n * m - 1.0) / (6.0 * total))


def cvm_test(data: ArrayLike, cdf: CdfLike, convention: Convention = Convention.STANDARD) -> Tuple[float, float]:
    """(T, p-value)."""
    convention = Convention(convention)
    x = _sorted(data)
    fitted = _fitted_values(x, cdf)
    if convention == Convention.PUBLISHED:
        t = max(cvm_2samp_ordinal(ecdf(x)(x), fitted), 0.0)
        return t, min(published_cvm_pvalue(t), 1.0)
    res = stats.cramervonmises(x, _cdf_fn(cdf))
    return float(res.statistic), float(np.clip(res.pvalue, 0.0, 1.0))


def goodness_of_fit(data: ArrayLike, cdf: CdfLike, convention: Convention = Convention.STANDARD) -> GofResult:
    convention = Convention(convention)
    ks_d, ks_p, ks_method = ks_test(data, cdf, convention)
    cvm_t, cvm_p = cvm_test(data, cdf, convention)
    log.debug("gof.done", convention=convention.value, ks=ks_d, cvm=cvm_t)
    return GofResult(
        ks_stat=ks_d,
        ks_pvalue=float(np.clip(ks_p, 0.0, 1.0)),
        cvm_stat=cvm_t,
        cvm_pvalue=cvm_p,
        convention=convention,
        ks_method=ks_method,
    )


def both_conventions(data: ArrayLike, cdf: CdfLike) -> List[GofResult]:
    return [goodness_of_fit(data, cdf, c) for c in (Convention.STANDARD, Convention.PUBLISHED)]
