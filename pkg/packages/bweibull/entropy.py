# packages/bweibull/entropy.py
"""Tsallis, quadratic and Shannon entropies.

Quadrature gives the reported value. Closed forms and series run alongside
when their hypotheses hold and land in `analytic_value`.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy import special

from packages.bweibull.dist import BWeibull, ParamVector, log_pdf_values
from packages.bweibull.errors import DomainError, SeriesDivergenceError
from packages.bweibull.models import EntropyMethod, EntropyValue
from packages.bweibull.quadrature import QuadratureResult, integrate_scalar
from packages.shared.log import get_logger
from packages.shared.settings import settings

log = get_logger(__name__)

# closed-form quadratic entropy is skipped this close to the Γ(2 − 1/α) pole
_POLE_MARGIN = 1e-4
_GROWTH_RUN = 5


# ---------- shared integrals ----------

@lru_cache(maxsize=512)
def _power_integral(alpha: float, beta: float, delta: float, q: float) -> QuadratureResult:
    dist = BWeibull.of(alpha, beta, delta)
    lz = dist.log_z

    def integrand(x: float) -> float:
        return float(np.exp(q * log_pdf_values(alpha, beta, delta, np.asarray(x), lz)))

    return integrate_scalar(integrand, 0.0, np.inf, breakpoints=dist.breakpoints())


def power_integral(theta: ParamVector, q: float) -> QuadratureResult:
    """∫ f^q dx, computed once per (θ, q)."""
    return _power_integral(theta.alpha, theta.beta, theta.delta, float(q))


def mu_g(theta: ParamVector) -> float:
    """E[G(X)] = 1 + (1 − δμ)² + δ²σ²."""
    dist = BWeibull(theta)
    mu, var = dist.mean(), dist.variance()
    return 1.0 + (1.0 - theta.delta * mu) ** 2 + theta.delta ** 2 * var


# ---------- Tsallis ----------

def tsallis_series(theta: ParamVector, q: float, *, max_terms: Optional[int] = None, rtol: float = 1e-12) -> Tuple[float, int]:
    """Binomial expansion of G^q in powers of (1 − δx)², integrated term by term.

    Returns (S_q, outer terms used). The expansion only terminates for integer
    q >= 0; otherwise growing outer terms raise SeriesDivergenceError.
    """
    a, b, d = theta.alpha, theta.beta, theta.delta
    max_terms = settings.TSALLIS_MAX_TERMS if max_terms is None else max_terms
    dist = BWeibull(theta)
    is_integer_q = float(q).is_integer() and q >= 0

    log_pref = q * (np.log(a) - np.log(b) - dist.log_z)
    total, prev, growth = 0.0, np.inf, 0
    for k in range(max_terms):
        ck = special.binom(q, k)
        if ck == 0.0 and is_integer_q and k > q:
            return (1.0 - total) / (q - 1.0), k
        l = np.arange(2 * k + 1, dtype=float)
        shape = q + (l - q + 1.0) / a
        log_terms = (
            special.gammaln(2 * k + 1.0) - special.gammaln(l + 1.0) - special.gammaln(2 * k - l + 1.0)
            + special.xlogy(l, abs(d)) + (l + 1.0) * np.log(b) - np.log(a)
            - shape * np.log(q) + special.gammaln(shape)
        )
        term = ck * np.exp(log_pref + special.logsumexp(log_terms))
        if not np.isfinite(term):
            raise SeriesDivergenceError("Tsallis series overflowed", terms=k)
        total += term
        mag = abs(term)
        growth = growth + 1 if k > 0 and mag > prev else 0
        if growth >= _GROWTH_RUN:
            raise SeriesDivergenceError("Tsallis outer terms keep growing", terms=k + 1)
        if k > 0 and mag < rtol * abs(total) and mag < prev:
            return (1.0 - total) / (q - 1.0), k + 1
        prev = mag
    raise SeriesDivergenceError(f"Tsallis series did not settle within {max_terms} terms", terms=max_terms)


def tsallis(theta: ParamVector, q: float) -> EntropyValue:
    if q == 1:
        raise DomainError("Tsallis entropy needs q != 1 (q -> 1 is the Shannon entropy)")
    if not q > 0:
        raise DomainError("Tsallis entropy needs q > 0")
    quad = power_integral(theta, q)
    value = (1.0 - quad.value) / (q - 1.0)

    if not (theta.delta < 0 and q * (theta.alpha - 1.0) > -1.0):
        return EntropyValue(value=value, method=EntropyMethod.QUADRATURE, hypothesis_met=False,
                            quadrature_converged=quad.converged)
    try:
        series, terms = tsallis_series(theta, q)
    except SeriesDivergenceError as exc:
        log.info("entropy.tsallis.series_diverged", q=q, terms=exc.terms, reason=str(exc))
        return EntropyValue(value=value, method=EntropyMethod.QUADRATURE, hypothesis_met=False,
                            series_terms=exc.terms, quadrature_converged=quad.converged)
    if abs(series - value) > 1e-6:
        log.warning("entropy.tsallis.mismatch", q=q, series=series, quadrature=value)
    return EntropyValue(value=value, method=EntropyMethod.SERIES, analytic_value=series,
                        series_terms=terms, quadrature_converged=quad.converged)


# ---------- quadratic ----------

def quadratic_closed_form(theta: ParamVector) -> float:
    """H₂ = 2 log Z − log α − log B, valid for α > 1/2."""
    a, b, d = theta.alpha, theta.beta, theta.delta
    if not a > 0.5:
        raise DomainError("quadratic closed form needs alpha > 1/2")
    g = special.gamma
    bracket = (
        2.0 ** (1.0 / a) * g(2.0 - 1.0 / a) / b
        - 2.0 * d
        + 2.0 * d * d * b * g(2.0 + 1.0 / a) / 2.0 ** (1.0 / a)
        - d ** 3 * b * b * g(2.0 + 2.0 / a) / 2.0 ** (2.0 / a)
        + d ** 4 * b ** 3 * g(2.0 + 3.0 / a) / 2.0 ** (2.0 + 3.0 / a)
    )
    return 2.0 * theta.log_z - np.log(a) - np.log(bracket)


def quadratic(theta: ParamVector) -> EntropyValue:
    if theta.alpha <= 0.5:
        # f² ~ x^{2α−2} near 0 is not integrable
        log.warning("entropy.quadratic.divergent", alpha=theta.alpha)
        return EntropyValue(value=float("-inf"), method=EntropyMethod.QUADRATURE,
                            hypothesis_met=False, quadrature_converged=False)
    quad = power_integral(theta, 2.0)
    value = -float(np.log(quad.value))
    if theta.alpha - 0.5 < _POLE_MARGIN:
        log.info("entropy.quadratic.near_pole", alpha=theta.alpha)
        return EntropyValue(value=value, method=EntropyMethod.QUADRATURE, hypothesis_met=False,
                            quadrature_converged=quad.converged)
    closed = float(quadratic_closed_form(theta))
    return EntropyValue(value=value, method=EntropyMethod.CLOSED_FORM, analytic_value=closed,
                        quadrature_converged=quad.converged)


# ---------- Shannon ----------

def e_log_g_quadrature(theta: ParamVector) -> QuadratureResult:
    d = theta.delta
    return BWeibull(theta).expect(lambda x: float(np.log1p((1.0 - d * x) ** 2)))


def e_log_g_series(theta: ParamVector, *, max_terms: Optional[int] = None, rtol: float = 1e-9) -> Tuple[float, int]:
    """Taylor expansion of log G around μ_G, expanded through the binomial theorem.

    t_n = Σ_k Σ_j Σ_l C(n,k) C(k,j) C(2j,l) (−1)^{l−k+1} δ^l E[X^l] / (n μ_G^k),
    evaluated stage-wise: E[(1 − δX)^{2j}], then E[G^k], then t_n.
    """
    max_terms = settings.SHANNON_MAX_TERMS if max_terms is None else max_terms
    dist = BWeibull(theta)
    d = theta.delta
    mu = mu_g(theta)

    with np.errstate(over="ignore", invalid="ignore"):
        moments = np.array([dist.raw_moment(float(l)) for l in range(2 * max_terms + 1)])
        # E[(1 - δX)^{2j}] for j = 0..N
        shifted = np.empty(max_terms + 1)
        for j in range(max_terms + 1):
            l = np.arange(2 * j + 1)
            shifted[j] = np.sum(special.comb(2 * j, l) * (-d) ** l * moments[: 2 * j + 1])
        # E[G^k] / μ^k
        g_pow = np.empty(max_terms + 1)
        for k in range(max_terms + 1):
            j = np.arange(k + 1)
            g_pow[k] = np.sum(special.comb(k, j) * shifted[: k + 1]) / mu ** k

    total = float(np.log(mu))
    prev, growth = np.inf, 0
    for n in range(1, max_terms + 1):
        k = np.arange(n + 1)
        sign = np.where(k % 2 == 0, -1.0, 1.0)
        term = float(np.sum(special.comb(n, k) * sign * g_pow[: n + 1]) / n)
        if not np.isfinite(term):
            raise SeriesDivergenceError("log G series overflowed", terms=n)
        total += term
        mag = abs(term)
        growth = growth + 1 if mag > prev else 0
        if growth >= _GROWTH_RUN:
            raise SeriesDivergenceError("log G outer terms keep growing", terms=n)
        if n > 5 and mag < rtol * max(1.0, abs(total)):
            return total, n
        prev = mag
    raise SeriesDivergenceError(f"log G series did not settle within {max_terms} terms", terms=max_terms)


def shannon_decomposition(theta: ParamVector, e_log_g: float) -> float:
    """H₁ = log Z + α log β − log α − E[log G] − (α−1) E[log X] + E[X^α]/β^α."""
    dist = BWeibull(theta)
    a, b = theta.alpha, theta.beta
    return float(
        dist.log_z + a * np.log(b) - np.log(a) - e_log_g
        - (a - 1.0) * dist.expected_log() + dist.e_xalpha() / b ** a
    )


def shannon_quadrature(theta: ParamVector) -> QuadratureResult:
    dist = BWeibull(theta)
    lz = dist.log_z

    def integrand(x: float) -> float:
        lf = float(log_pdf_values(theta.alpha, theta.beta, theta.delta, np.asarray(x), lz))
        return 0.0 if lf == -np.inf else -np.exp(lf) * lf

    return integrate_scalar(integrand, 0.0, np.inf, breakpoints=dist.breakpoints())


def shannon(theta: ParamVector) -> EntropyValue:
    direct = shannon_quadrature(theta)
    try:
        elg, terms = e_log_g_series(theta)
    except SeriesDivergenceError as exc:
        log.debug("entropy.shannon.series_diverged", terms=exc.terms, reason=str(exc))
        elg_q = e_log_g_quadrature(theta)
        return EntropyValue(
            value=direct.value,
            method=EntropyMethod.CLOSED_FORM,
            analytic_value=shannon_decomposition(theta, elg_q.value),
            series_terms=exc.terms,
            hypothesis_met=False,
            quadrature_converged=direct.converged and elg_q.converged,
        )
    return EntropyValue(
        value=direct.value,
        method=EntropyMethod.SERIES,
        analytic_value=shannon_decomposition(theta, elg),
        series_terms=terms,
        quadrature_converged=direct.converged,
    )
