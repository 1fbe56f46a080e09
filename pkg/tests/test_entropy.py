# tests/test_entropy.py
import math

import pytest

from packages.bweibull import entropy
from packages.bweibull.dist import BWeibull, ParamVector
from packages.bweibull.errors import DomainError, SeriesDivergenceError
from packages.bweibull.models import EntropyMethod

EULER_GAMMA = 0.5772156649015329


def _theta(a, b, d):
    return ParamVector(alpha=a, beta=b, delta=d)


# ---------- Shannon ----------

def test_shannon_exponential():
    h = entropy.shannon(_theta(1.0, 1.0, 0.0))
    assert h.value == pytest.approx(1.0, rel=1e-8)
    assert h.analytic_value == pytest.approx(1.0, rel=1e-8)


def test_shannon_weibull_formula():
    a, b = 2.5, 1.7
    expected = EULER_GAMMA * (1 - 1 / a) + math.log(b / a) + 1
    assert entropy.shannon(_theta(a, b, 0.0)).value == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("theta", [(2.0, 1.0, 0.5), (3.7, 2.0, -2.0), (1.3, 1.0, 1.5)])
def test_shannon_decomposition_matches_direct_integral(theta):
    t = _theta(*theta)
    elg = entropy.e_log_g_quadrature(t).value
    direct = entropy.shannon_quadrature(t).value
    assert entropy.shannon_decomposition(t, elg) == pytest.approx(direct, rel=1e-7, abs=1e-9)


@pytest.mark.parametrize("theta", [(2.0, 1.0, 0.2), (1.0, 1.0, 0.0)])
def test_shannon_analytic_layer_agrees(theta):
    h = entropy.shannon(_theta(*theta))
    assert h.analytic_value == pytest.approx(h.value, rel=1e-6, abs=1e-9)


def test_log_g_series_small_delta():
    t = _theta(2.0, 1.0, 0.2)
    series, terms = entropy.e_log_g_series(t, rtol=1e-8)
    assert terms > 5
    assert series == pytest.approx(entropy.e_log_g_quadrature(t).value, rel=1e-6)


def test_mu_g_is_mean_of_g():
    t = _theta(2.0, 1.5, 0.7)
    direct = BWeibull(t).expect(lambda x: 1.0 + (1.0 - t.delta * x) ** 2).value
    assert entropy.mu_g(t) == pytest.approx(direct, rel=1e-9)


# ---------- quadratic ----------

def test_quadratic_exponential_is_log_two():
    h = entropy.quadratic(_theta(1.0, 1.0, 0.0))
    assert h.value == pytest.approx(math.log(2.0), rel=1e-9)
    assert h.method == EntropyMethod.CLOSED_FORM
    assert h.analytic_value == pytest.approx(math.log(2.0), rel=1e-12)


@pytest.mark.parametrize("theta", [(2.0, 1.0, 0.5), (3.0, 2.0, -0.4), (1.5, 0.8, 2.0), (0.8, 1.2, 1.0)])
def test_quadratic_closed_form_matches_quadrature(theta):
    h = entropy.quadratic(_theta(*theta))
    assert h.analytic_value == pytest.approx(h.value, rel=1e-7)


def test_quadratic_divergent_below_half():
    h = entropy.quadratic(_theta(0.5, 1.0, 0.3))
    assert h.value == -math.inf
    assert not h.hypothesis_met
    with pytest.raises(DomainError):
        entropy.quadratic_closed_form(_theta(0.4, 1.0, 0.3))


def test_quadratic_near_pole_falls_back():
    h = entropy.quadratic(_theta(0.50005, 1.0, 0.3))
    assert h.method == EntropyMethod.QUADRATURE
    assert h.analytic_value is None
    assert not h.hypothesis_met


# ---------- Tsallis ----------

def test_tsallis_domain():
    t = _theta(2.0, 1.0, -0.5)
    with pytest.raises(DomainError):
        entropy.tsallis(t, 1.0)
    with pytest.raises(DomainError):
        entropy.tsallis(t, 0.0)


def test_tsallis_integer_q_series_terminates():
    t = _theta(2.0, 1.0, -0.5)
    s = entropy.tsallis(t, 2.0)
    assert s.method == EntropyMethod.SERIES
    assert s.series_terms == 3
    assert s.analytic_value == pytest.approx(s.value, rel=1e-8)


def test_tsallis_two_is_tied_to_quadratic():
    t = _theta(2.0, 1.0, -0.5)
    s2 = entropy.tsallis(t, 2.0).value
    h2 = entropy.quadratic(t).value
    assert s2 == pytest.approx(1.0 - math.exp(-h2), rel=1e-12)


def test_tsallis_fractional_q_series_diverges():
    t = _theta(1.2, 1.0, -1.0)
    with pytest.raises(SeriesDivergenceError) as exc:
        entropy.tsallis_series(t, 1.5)
    assert exc.value.terms > 0
    s = entropy.tsallis(t, 1.5)
    assert s.method == EntropyMethod.QUADRATURE
    assert not s.hypothesis_met


def test_tsallis_positive_delta_is_quadrature_only():
    s = entropy.tsallis(_theta(2.0, 1.0, 0.8), 2.0)
    assert s.method == EntropyMethod.QUADRATURE
    assert s.analytic_value is None


def test_tsallis_approaches_shannon():
    t = _theta(2.0, 1.3, 0.6)
    near = entropy.tsallis(t, 1.0001).value
    assert near == pytest.approx(entropy.shannon(t).value, abs=2e-3)


def test_tsallis_converges_to_shannon_from_below_one():
    # S_q = H − (q − 1)/2 · E[log² f] + O((q − 1)²), so S_q > H for q just under 1
    t = _theta(2.0, 1.0, 0.5)
    h = entropy.shannon(t).value
    gaps = [entropy.tsallis(t, q).value - h for q in (0.9, 0.99, 0.999)]
    assert gaps[0] > gaps[1] > 0
    assert abs(gaps[2]) < 5e-3


def test_power_integral_at_one_is_mass():
    assert entropy.power_integral(_theta(1.7, 0.9, 1.4), 1.0).value == pytest.approx(1.0, abs=1e-9)
