# tests/oracles.py
"""Quadrature oracles that do not go through the closed forms under test."""
from __future__ import annotations

from typing import Callable

import numpy as np
from scipy import integrate

from packages.bweibull.dist import BWeibull


def expect_u(dist: BWeibull, h: Callable[[float], float], *, epsrel: float = 1e-12) -> float:
    """E[h(X)] with x = β u^{1/α}, which turns the Weibull kernel into e^{-u}."""
    a, b = dist.alpha, dist.beta

    def integrand(u: float) -> float:
        if u <= 0.0:
            return 0.0
        x = b * u ** (1.0 / a)
        lf = float(dist.log_pdf(x))
        weight = np.exp(lf + np.log(b / a) + (1.0 / a - 1.0) * np.log(u))
        if weight == 0.0:
            return 0.0
        return float(h(x) * weight)

    total = 0.0
    for lo, hi in ((0.0, 1.0), (1.0, 10.0), (10.0, np.inf)):
        val, _ = integrate.quad(integrand, lo, hi, epsabs=1e-14, epsrel=epsrel, limit=400)
        total += val
    return total


def integrate_pdf(dist: BWeibull, lower: float, upper: float) -> float:
    val, _ = integrate.quad(lambda x: float(dist.pdf(x)), lower, upper, epsabs=1e-14, epsrel=1e-12, limit=400)
    return val
