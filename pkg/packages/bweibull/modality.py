# packages/bweibull/modality.py
"""Uni/bimodality of BWeibull(θ).

The critical points are the positive roots of the mode-equation residual

    R(x) = αδ²x^{α+2} − 2αδx^{α+1} + 2αx^α − (α+1)β^αδ²x² + 2αβ^αδx − 2(α−1)β^α
         = −x β^α G(x) (log f)'(x),

so R < 0 where the density increases and R > 0 where it decreases. Only interior
maxima are counted: an α ≤ 1 density that starts at its supremum at x = 0 and has
one interior maximum is Unimodal.
"""
from __future__ import annotations

from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from packages.bweibull.dist import ArrayLike, BWeibull, ParamVector
from packages.bweibull.errors import DomainError
from packages.bweibull.models import Classification, CriticalPoint, ModalityMethod, ModalityReport
from packages.shared.log import get_logger
from packages.shared.settings import settings

log = get_logger(__name__)

Coefficients = Tuple[float, float, float, float, float]

_ROOT_XTOL = 1e-10
_MERGE_FRACTION = 1e-8


def mode_equation_residual(theta: ParamVector, x: ArrayLike) -> ArrayLike:
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("mode equation is defined for x > 0")
    a, b, d = theta.alpha, theta.beta, theta.delta
    ba = b ** a
    with np.errstate(over="ignore", invalid="ignore"):
        xa = arr ** a
        out = (
            a * d * d * xa * arr * arr
            - 2.0 * a * d * xa * arr
            + 2.0 * a * xa
            - (a + 1.0) * ba * d * d * arr * arr
            + 2.0 * a * ba * d * arr
            - 2.0 * (a - 1.0) * ba
        )
    return float(out) if out.ndim == 0 else out


# ---------- alpha = 2: quartic ----------

def quartic_coefficients(beta: float, delta: float) -> Coefficients:
    k = beta * beta * delta * delta
    return (2.0 * delta * delta, -4.0 * delta, 4.0 - 3.0 * k, 4.0 * beta * beta * delta, -2.0 * beta * beta)


def _discriminant_terms(a: float, b: float, c: float, d: float, e: float) -> List[float]:
    return [
        256 * a**3 * e**3,
        -192 * a**2 * b * d * e**2,
        -128 * a**2 * c**2 * e**2,
        144 * a**2 * c * d**2 * e,
        -27 * a**2 * d**4,
        144 * a * b**2 * c * e**2,
        -6 * a * b**2 * d**2 * e,
        -80 * a * b * c**2 * d * e,
        18 * a * b * c * d**3,
        16 * a * c**4 * e,
        -4 * a * c**3 * d**2,
        -27 * b**4 * e**2,
        18 * b**3 * c * d * e,
        -4 * b**3 * d**3,
        -4 * b**2 * c**3 * e,
        b**2 * c**2 * d**2,
    ]


def quartic_discriminant(beta: float, delta: float) -> Tuple[float, Coefficients]:
    coeffs = quartic_coefficients(beta, delta)
    return float(sum(_discriminant_terms(*coeffs))), coeffs


def _discriminant_is_zero(coeffs: Coefficients, disc: float, rtol: float = 1e-9) -> bool:
    scale = sum(abs(t) for t in _discriminant_terms(*coeffs))
    return scale == 0.0 or abs(disc) <= rtol * scale


def quartic_auxiliary(coeffs: Coefficients) -> Dict[str, float]:
    a, b, c, d, e = coeffs
    return {
        "P": 8 * a * c - 3 * b * b,
        "D": 64 * a**3 * e - 16 * a**2 * c**2 + 16 * a * b**2 * c - 16 * a**2 * b * d - 3 * b**4,
        "delta0": c * c - 3 * b * d + 12 * a * e,
    }


# ---------- critical points from candidate roots ----------

def _positive_real_roots(poly: Sequence[float]) -> List[float]:
    roots = np.roots(np.asarray(poly, dtype=float))
    keep = [float(r.real) for r in roots if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > 0]
    return sorted(keep)


def _merge_close(roots: List[float], tol: float) -> List[float]:
    """Odd clusters collapse to one root; even clusters are tangential and vanish."""
    merged: List[float] = []
    cluster: List[float] = []
    for r in sorted(roots):
        if cluster and r - cluster[-1] > tol:
            if len(cluster) % 2 == 1:
                merged.append(float(np.mean(cluster)))
            cluster = []
        cluster.append(r)
    if cluster and len(cluster) % 2 == 1:
        merged.append(float(np.mean(cluster)))
    return merged


def _critical_points(residual: Callable[[np.ndarray], np.ndarray], roots: List[float]) -> List[CriticalPoint]:
    if not roots:
        return []
    r = np.asarray(roots)
    midpoints = np.concatenate(([r[0] * 0.5], 0.5 * (r[:-1] + r[1:]), [r[-1] * 2.0]))
    signs = np.sign(residual(midpoints))
    points: List[CriticalPoint] = []
    for i, x in enumerate(roots):
        left, right = signs[i], signs[i + 1]
        if left < 0 < right:
            points.append(CriticalPoint(x=x, kind="max"))
        elif left > 0 > right:
            points.append(CriticalPoint(x=x, kind="min"))
    return points


def _alternates(points: List[CriticalPoint]) -> bool:
    return all(p.kind != q.kind for p, q in zip(points, points[1:]))


def _classify_points(points: List[CriticalPoint]) -> Classification:
    if not _alternates(points):
        return Classification.INDETERMINATE
    n_max = sum(1 for p in points if p.kind == "max")
    if n_max == 0:
        return Classification.DECREASING
    if n_max == 1:
        return Classification.UNIMODAL
    if n_max == 2:
        return Classification.BIMODAL
    log.warning("modality.many_maxima", maxima=n_max)
    return Classification.INDETERMINATE


def classify_quartic(beta: float, delta: float) -> ModalityReport:
    """α = 2 classification from the sign pattern of p₄ between its positive roots."""
    theta = ParamVector(alpha=2.0, beta=beta, delta=delta)
    disc, coeffs = quartic_discriminant(beta, delta)
    poly = np.poly1d(coeffs)
    roots = _merge_close(_positive_real_roots(coeffs), _MERGE_FRACTION * beta)
    points = _critical_points(poly, roots)
    return ModalityReport(
        classification=_classify_points(points),
        critical_points=points,
        method=ModalityMethod.ALPHA2_DISCRIMINANT,
        discriminant=disc,
        coefficients=coeffs,
        auxiliary=quartic_auxiliary(coeffs),
    )


# ---------- numeric path ----------

def _numeric(theta: ParamVector, grid_points: int) -> Tuple[List[CriticalPoint], Optional[str]]:
    dist = BWeibull(theta)
    lo, hi = dist.quantile(np.array([1e-6, 1.0 - 1e-6]))
    grid = np.geomspace(lo, hi, grid_points)

    def residual(x):
        return mode_equation_residual(theta, x)

    values = residual(grid)
    if not np.all(np.isfinite(values)):
        return [], "mode-equation residual is not finite on the scan grid"
    signs = np.sign(values)
    roots: List[float] = []
    for i in range(len(grid) - 1):
        if signs[i] == 0:
            roots.append(float(grid[i]))
        elif signs[i] * signs[i + 1] < 0:
            roots.append(float(optimize.brentq(residual, grid[i], grid[i + 1], xtol=_ROOT_XTOL * theta.beta, rtol=4 * np.finfo(float).eps)))
    merged = _merge_close(roots, _MERGE_FRACTION * theta.beta)
    note = None
    if len(merged) != len(roots):
        note = "tangential roots merged"
    return _critical_points(residual, merged), note


def classify(theta: ParamVector, *, grid_points: Optional[int] = None) -> ModalityReport:
    grid_points = grid_points or settings.MODALITY_GRID_POINTS
    a, b, d = theta.alpha, theta.beta, theta.delta

    if a == 1.0 and (d < -1.0 / b or d > 0):
        # residual = x * p2(x)
        p2 = (d * d, -2.0 * d * (1.0 + b * d), 2.0 * (1.0 + b * d))
        roots = _merge_close(_positive_real_roots(p2), _MERGE_FRACTION * b)
        points = _critical_points(lambda x: mode_equation_residual(theta, x), roots)
        cls = Classification.UNIMODAL if d < 0 else _classify_points(points)
        return ModalityReport(classification=cls, critical_points=points, method=ModalityMethod.ALPHA1_RULE)

    disc = coeffs = None
    aux: Dict[str, float] = {}
    if a == 2.0 and d != 0.0:
        disc, coeffs = quartic_discriminant(b, d)
        aux = quartic_auxiliary(coeffs)
    if a == 2.0 and d > 0:
        k = b * b * d * d
        zero = _discriminant_is_zero(coeffs, disc)
        decided: Optional[Classification] = None
        if not zero and disc > 0 and 13.0 / 12.0 < k < 4.0 / 3.0:
            decided = Classification.BIMODAL
        elif not zero and disc < 0 and k <= 4.0 / 3.0:
            decided = Classification.UNIMODAL
        elif zero and abs(k - 4.0 / 3.0) <= 1e-9:
            decided = Classification.UNIMODAL
        if decided is not None:
            analytic = classify_quartic(b, d)
            if analytic.classification != decided:
                log.warning("modality.theorem_mismatch", beta=b, delta=d, theorem=decided.value,
                            roots=analytic.classification.value)
            return analytic.model_copy(update={"classification": decided})

    points, note = _numeric(theta, grid_points)
    if note and "not finite" in note:
        cls = Classification.INDETERMINATE
    else:
        cls = _classify_points(points)
    if a == 1.0:
        note = "alpha = 1 with -1/beta <= delta <= 0 is outside the analytic rule"
    return ModalityReport(
        classification=cls,
        critical_points=points,
        method=ModalityMethod.NUMERIC,
        discriminant=disc,
        coefficients=coeffs,
        auxiliary=aux,
        note=note,
    )
