# packages/bweibull/specfun.py
"""Gamma-family special functions with domain checks.

scipy.special (cephes) evaluates the incomplete gamma ratios with the power
series below x < s + 1 and the Legendre continued fraction above it, which is
the split every closed form in this package relies on. The wrappers here only
add domain validation and the Γ(0, x) = 0 convention used by the truncated
Weibull moments.
"""
from __future__ import annotations

from typing import Union

import numpy as np
from scipy import special

from packages.bweibull.errors import DomainError

ArrayLike = Union[float, np.ndarray]


def _out(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def _require_positive(name: str, x: np.ndarray) -> None:
    if np.any(~(x > 0)):
        raise DomainError(f"{name} requires a positive argument")


def _require_nonneg(name: str, x: np.ndarray) -> None:
    if np.any(~(x >= 0)):
        raise DomainError(f"{name} requires a nonnegative argument")


def ln_gamma(x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    _require_positive("ln_gamma", x)
    return _out(special.gammaln(x))


def gamma(x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    _require_positive("gamma", x)
    return _out(special.gamma(x))


def gamma_regularized_lower(s: ArrayLike, x: ArrayLike) -> ArrayLike:
    """P(s, x) = γ(s, x) / Γ(s)."""
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    _require_positive("gamma_regularized_lower (s)", s)
    _require_nonneg("gamma_regularized_lower (x)", x)
    return _out(special.gammainc(s, x))


def gamma_regularized_upper(s: ArrayLike, x: ArrayLike) -> ArrayLike:
    """Q(s, x) = Γ(s, x) / Γ(s); s = 0 returns 0."""
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    _require_nonneg("gamma_regularized_upper (s)", s)
    _require_nonneg("gamma_regularized_upper (x)", x)
    s_safe = np.where(s == 0, 1.0, s)
    q = np.where(s == 0, 0.0, special.gammaincc(s_safe, x))
    return _out(q)


def lower_incomplete_gamma(s: ArrayLike, x: ArrayLike) -> ArrayLike:
    """Unregularized γ(s, x) = P(s, x) Γ(s)."""
    s = np.asarray(s, dtype=float)
    p = np.asarray(gamma_regularized_lower(s, x))
    return _out(p * special.gamma(s))


def upper_incomplete_gamma(s: ArrayLike, x: ArrayLike) -> ArrayLike:
    """Unregularized Γ(s, x) = Q(s, x) Γ(s), with Γ(0, x) = 0."""
    s = np.asarray(s, dtype=float)
    q = np.asarray(gamma_regularized_upper(s, x))
    g = special.gamma(np.where(s == 0, 1.0, s))
    return _out(np.where(s == 0, 0.0, q * g))


def digamma(x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    _require_positive("digamma", x)
    return _out(special.digamma(x))


def trigamma(x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    _require_positive("trigamma", x)
    return _out(special.polygamma(1, x))
