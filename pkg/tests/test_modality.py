# tests/test_modality.py
import math

import numpy as np
import numpy.testing as npt
import pytest

from packages.bweibull.dist import BWeibull, ParamVector
from packages.bweibull.errors import DomainError
from packages.bweibull.modality import (
    classify,
    classify_quartic,
    mode_equation_residual,
    quartic_coefficients,
    quartic_discriminant,
)
from packages.bweibull.models import Classification, ModalityMethod


def _theta(a, b, d):
    return ParamVector(alpha=a, beta=b, delta=d)


def dense_scan(theta, points=40_000):
    """Interior local maxima of log f on a geometric grid covering all but 1e-6 of each tail."""
    dist = BWeibull(theta)
    lo, hi = dist.quantile(np.array([1e-6, 1.0 - 1e-6]))
    x = np.geomspace(lo, hi, points)
    lf = np.asarray(dist.log_pdf(x))
    peaks = np.flatnonzero((lf[1:-1] > lf[:-2]) & (lf[1:-1] >= lf[2:])) + 1
    return x[peaks]


_LABEL = {0: Classification.DECREASING, 1: Classification.UNIMODAL, 2: Classification.BIMODAL}


# ---------- mode equation ----------

def test_residual_is_scaled_log_density_slope():
    theta = _theta(2.7, 1.3, 0.8)
    dist = BWeibull(theta)
    x = np.array([0.3, 1.0, 2.0])
    h = 1e-6 * x
    slope = (np.asarray(dist.log_pdf(x + h)) - np.asarray(dist.log_pdf(x - h))) / (2 * h)
    expected = -x * theta.beta ** theta.alpha * np.asarray(dist.g_factor(x)) * slope
    npt.assert_allclose(mode_equation_residual(theta, x), expected, rtol=1e-6)


def test_residual_domain():
    with pytest.raises(DomainError):
        mode_equation_residual(_theta(2.0, 1.0, 1.0), 0.0)


def test_alpha2_residual_is_the_quartic():
    b, d = 1.4, 0.9
    x = np.linspace(0.05, 4.0, 40)
    npt.assert_allclose(
        mode_equation_residual(_theta(2.0, b, d), x),
        np.poly1d(quartic_coefficients(b, d))(x),
        rtol=1e-12, atol=1e-12,
    )


def test_quadratic_coefficient_vanishes_at_four_thirds():
    assert quartic_coefficients(1.0, math.sqrt(4.0 / 3.0))[2] == pytest.approx(0.0, abs=1e-12)


def test_discriminant_against_root_products():
    for b, d in ((1.0, 1.0), (0.7, 2.1), (2.0, -0.4)):
        disc, coeffs = quartic_discriminant(b, d)
        r = np.roots(coeffs)
        prod = np.prod([(r[i] - r[j]) ** 2 for i in range(4) for j in range(i + 1, 4)])
        expected = coeffs[0] ** 6 * prod
        scale = 256 * max(abs(c) for c in coeffs) ** 6
        assert abs(expected.imag) <= 1e-9 * scale
        assert disc == pytest.approx(expected.real, abs=1e-9 * scale)


def test_discriminant_vanishes_with_double_root():
    # k = beta^2 delta^2 = 2 puts a double root at x = 1/sqrt(2)
    disc, coeffs = quartic_discriminant(1.0, math.sqrt(2.0))
    scale = max(abs(c) for c in coeffs) ** 6
    assert abs(disc) <= 1e-9 * scale
    assert np.poly1d(coeffs)(1.0 / math.sqrt(2.0)) == pytest.approx(0.0, abs=1e-12)


# ---------- classification against a dense scan ----------

@pytest.mark.parametrize("theta", [
    (2.0, 1.0, 0.5),
    (2.0, 1.0, 1.1),
    (2.0, 1.0, math.sqrt(1.99)),
    (2.0, 1.0, 2.0),
    (2.0, 1.0, 3.0),
    (2.0, 1.0, -1.0),
    (2.0, 2.0, 0.3),
    (1.0, 1.0, -2.0),
    (1.0, 1.0, 1.0),
    (1.0, 1.0, 3.0),
    (3.0, 2.0, 2.3),
    (3.7, 0.5, -2.0),
])
def test_classify_agrees_with_dense_scan(theta):
    t = _theta(*theta)
    report = classify(t)
    peaks = dense_scan(t)
    assert report.classification == _LABEL[len(peaks)]
    maxima = sorted(p.x for p in report.critical_points if p.kind == "max")
    npt.assert_allclose(maxima, peaks, rtol=1e-3)


def test_shallow_bimodal_quartic():
    report = classify_quartic(1.0, math.sqrt(1.99))
    assert report.classification == Classification.BIMODAL
    assert report.method == ModalityMethod.ALPHA2_DISCRIMINANT
    assert [p.kind for p in report.critical_points] == ["max", "min", "max"]
    xs = [p.x for p in report.critical_points]
    assert xs[0] == pytest.approx(0.67, abs=0.03)
    assert xs[2] == pytest.approx(1.01, abs=0.03)
    assert set(report.auxiliary) == {"P", "D", "delta0"}


def test_critical_points_are_roots():
    t = _theta(2.0, 1.0, math.sqrt(1.99))
    for p in classify(t).critical_points:
        assert mode_equation_residual(t, p.x) == pytest.approx(0.0, abs=1e-9)


def test_alpha2_theorem_region_uses_discriminant():
    report = classify(_theta(2.0, 1.0, 0.5))
    assert report.method == ModalityMethod.ALPHA2_DISCRIMINANT
    assert report.discriminant < 0
    assert report.classification == Classification.UNIMODAL


def test_alpha1_rules():
    up = classify(_theta(1.0, 1.0, -2.0))
    assert up.method == ModalityMethod.ALPHA1_RULE
    assert up.classification == Classification.UNIMODAL

    # f'(x) is proportional to -(x - 2)^2 e^{-x}: an inflection, not a mode
    flat = classify(_theta(1.0, 1.0, 1.0))
    assert flat.method == ModalityMethod.ALPHA1_RULE
    assert flat.classification == Classification.DECREASING

    inside = classify(_theta(1.0, 1.0, -0.5))
    assert inside.method == ModalityMethod.NUMERIC
    assert inside.note is not None


def test_weibull_mode():
    # Weibull mode beta * ((alpha - 1) / alpha)^{1/alpha}
    a, b = 2.5, 1.5
    report = classify(_theta(a, b, 0.0))
    assert report.classification == Classification.UNIMODAL
    (peak,) = report.critical_points
    assert peak.x == pytest.approx(b * ((a - 1) / a) ** (1 / a), rel=1e-8)


# ---------- α = 2 grid ----------

def _alpha2_grid():
    """200 (β, δ) pairs; the α = 2 shape depends only on k = β²δ² and the sign of δ.

    Bimodality lives in a thin band of k just below 2; the grid keeps clear of its edges.
    """
    r = np.random.default_rng(31)
    betas = [0.5, 1.0, 2.5]
    ks = np.concatenate([
        r.uniform(0.01, 12.0, 40),
        r.uniform(0.01, 1.95, 80),
        np.linspace(1.978, 1.99, 13),
        r.uniform(2.05, 12.0, 67),
    ])
    signs = np.concatenate([-np.ones(40), np.ones(160)])
    return [(betas[i % 3], s * math.sqrt(k) / betas[i % 3]) for i, (k, s) in enumerate(zip(ks, signs))]


def test_alpha2_grid_against_dense_scan():
    grid = _alpha2_grid()
    assert len(grid) == 200
    counts = {c: 0 for c in Classification}
    for beta, delta in grid:
        report = classify_quartic(beta, delta)
        peaks = dense_scan(_theta(2.0, beta, delta))
        assert report.classification == _LABEL[len(peaks)], (beta, delta)
        counts[report.classification] += 1
    assert counts[Classification.BIMODAL] == 13
    assert counts[Classification.DECREASING] == 0


# ---------- invariants ----------

@pytest.mark.parametrize("theta", [(1.0, 1.0, -2.0), (1.0, 0.5, -3.0), (1.0, 2.0, -0.6)])
def test_alpha1_rising_start_peaks_above_origin(theta):
    t = _theta(*theta)
    report = classify(t)
    assert report.classification == Classification.UNIMODAL
    (peak,) = report.maxima
    # f(0+) = 2 / (β Z) when α = 1
    at_origin = 2.0 / (t.beta * t.z_const)
    assert BWeibull(t).pdf(1e-12 * t.beta) == pytest.approx(at_origin, rel=1e-9)
    assert BWeibull(t).pdf(peak) > at_origin


@pytest.mark.parametrize("theta", [(3.0, 1.0, -1.0), (4.0, 2.0, -0.5), (5.0, 1.0, -3.0)])
def test_integer_alpha_negative_delta_has_one_critical_point(theta):
    # log f is concave here: α ≥ 1 and G increasing on the support
    report = classify(_theta(*theta))
    assert report.classification == Classification.UNIMODAL
    assert len(report.critical_points) == 1


@pytest.mark.parametrize("theta", [
    (2.0, 1.0, math.sqrt(1.99)),
    (2.0, 1.0, 0.5),
    (3.0, 2.0, 2.3),
    (1.0, 1.0, -2.0),
    (4.0, 2.0, -0.5),
])
def test_maxima_are_local_peaks(theta):
    t = _theta(*theta)
    dist = BWeibull(t)
    maxima = classify(t).maxima
    assert maxima
    for x in maxima:
        h = 1e-4 * x
        assert dist.pdf(x - h) < dist.pdf(x)
        assert dist.pdf(x + h) < dist.pdf(x)
