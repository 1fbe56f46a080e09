# tests/test_gof.py
import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy import stats

from packages.bweibull.datasets import bundled_manifest, load_bundled
from packages.bweibull.dist import BWeibull
from packages.bweibull.errors import DomainError, GofError
from packages.bweibull.gof import (
    both_conventions,
    cvm_2samp_ordinal,
    cvm_test,
    ecdf,
    goodness_of_fit,
    ks_test,
    published_cvm_pvalue,
)
from packages.bweibull.models import Convention


def uniform_cdf(t):
    return np.clip(t, 0.0, 1.0)


# ---------- empirical CDF ----------

def test_ecdf_steps_and_ties():
    f = ecdf([3.0, 1.0, 2.0, 2.0])
    assert f(0.5) == 0.0
    assert f(1.0) == 0.25
    assert f(2.0) == 0.75
    assert f(2.5) == 0.75
    assert f(3.0) == 1.0
    npt.assert_array_equal(f(np.array([1.5, 10.0])), [0.25, 1.0])


def test_ecdf_rejects_empty_and_non_finite():
    with pytest.raises(DomainError):
        ecdf([])
    with pytest.raises(DomainError):
        ecdf([1.0, float("nan")])


# ---------- standard convention ----------

def test_ks_statistic_on_midpoint_sample():
    n = 20
    x = (np.arange(1, n + 1) - 0.5) / n
    d, p, method = ks_test(x, uniform_cdf)
    assert d == pytest.approx(0.5 / n, rel=1e-12)
    assert method == "asymptotic"
    assert p == pytest.approx(1.0, abs=1e-9)


def test_cvm_statistic_on_perfect_fit():
    n = 25
    x = (2 * np.arange(1, n + 1) - 1) / (2 * n)
    t, p = cvm_test(x, uniform_cdf)
    assert t == pytest.approx(1.0 / (12 * n), rel=1e-10)
    assert 0.0 <= p <= 1.0


def test_standard_matches_scipy():
    dist = BWeibull.of(2.0, 1.5, 0.7)
    x = dist.sample(80, seed=4)
    d, p, _ = ks_test(x, dist)
    ref = stats.kstest(x, dist.cdf, method="asymp")
    assert d == pytest.approx(ref.statistic)
    assert p == pytest.approx(ref.pvalue)
    t, pc = cvm_test(x, dist)
    ref_c = stats.cramervonmises(x, dist.cdf)
    assert t == pytest.approx(ref_c.statistic)
    assert pc == pytest.approx(ref_c.pvalue)


def test_sample_from_model_is_accepted():
    dist = BWeibull.of(3.0, 2.0, 1.5)
    g = goodness_of_fit(dist.sample(300, seed=8), dist)
    assert g.convention == Convention.STANDARD
    assert g.ks_pvalue > 1e-3
    assert g.cvm_pvalue > 1e-3


# ---------- published convention ----------

def test_published_cvm_pvalue():
    assert published_cvm_pvalue(0.0) == pytest.approx(1.0 / 6.0)
    assert published_cvm_pvalue(1.0) == pytest.approx(math.exp(-1.0) / 6.0)


def test_published_cvm_pvalue_reproduces_table_pairs():
    pairs = [
        (row.cvm, row.cvm_pvalue)
        for entry in bundled_manifest().values()
        for row in entry.table
    ]
    assert len(pairs) == 20
    for t, p in pairs:
        assert published_cvm_pvalue(t) == pytest.approx(p, abs=5e-5)


def test_published_ks_uses_exact_small_samples():
    dist = BWeibull.of(2.0, 1.5, 0.7)
    x = dist.sample(40, seed=2)
    d, p, method = ks_test(x, dist, Convention.PUBLISHED)
    emp = np.arange(1, 41) / 40
    fitted = np.asarray(dist.cdf(np.sort(x)))
    ref = stats.ks_2samp(emp, fitted, method="exact")
    assert method == "exact"
    assert d == pytest.approx(ref.statistic)
    assert p == pytest.approx(ref.pvalue)


def test_published_ks_falls_back_to_limit_distribution_with_ties():
    x = np.array([0.5, 1.0, 1.0, 2.0, 3.0])
    d, p, method = ks_test(x, BWeibull.of(2.0, 1.5, 0.0), Convention.PUBLISHED)
    assert method == "asymptotic"
    assert 0.0 <= d <= 1.0
    assert 0.0 <= p <= 1.0


def test_published_cvm_is_clamped_and_mapped():
    dist = BWeibull.of(2.0, 1.5, 0.7)
    x = dist.sample(60, seed=6)
    t, p = cvm_test(x, dist, Convention.PUBLISHED)
    assert t >= 0.0
    assert p == pytest.approx(math.exp(-t) / 6.0)
    assert p <= 1.0 / 6.0


def test_both_conventions_order():
    dist = BWeibull.of(2.0, 1.5, 0.7)
    res = both_conventions(dist.sample(30, seed=1), dist)
    assert [g.convention for g in res] == [Convention.STANDARD, Convention.PUBLISHED]


# ---------- malformed CDFs ----------

def test_cdf_outside_unit_interval():
    with pytest.raises(GofError):
        ks_test([0.1, 0.2, 0.3], lambda t: 2.0 * np.asarray(t) + 0.5)


def test_cdf_not_monotone():
    with pytest.raises(GofError):
        cvm_test([0.1, 0.2, 0.3], lambda t: 1.0 - np.asarray(t))


def test_ordinal_cvm_matches_scipy_without_ties(rng):
    x = rng.uniform(size=30)
    y = rng.uniform(size=30)
    ref = stats.cramervonmises_2samp(x, y).statistic
    assert cvm_2samp_ordinal(x, y) == pytest.approx(ref, rel=1e-12)


def test_ordinal_cvm_breaks_ties_by_order():
    # pooled ranks 1, 3 | 2, 4 instead of midranks 1.5, 3 | 1.5, 4
    assert cvm_2samp_ordinal([0.25, 0.5], [0.25, 0.75]) == pytest.approx(0.125)
    assert stats.cramervonmises_2samp([0.25, 0.5], [0.25, 0.75]).statistic == pytest.approx(0.0625)
    with pytest.raises(GofError):
        cvm_2samp_ordinal([], [0.5])


# ---------- invariance ----------

@pytest.mark.parametrize("convention", [Convention.STANDARD, Convention.PUBLISHED])
def test_ks_invariant_under_monotone_transform(convention):
    dist = BWeibull.of(2.0, 1.5, 0.7)
    x = dist.sample(50, seed=12)
    d, p, _ = ks_test(x, dist, convention)
    d_log, p_log, _ = ks_test(np.log(x), lambda t: dist.cdf(np.exp(t)), convention)
    assert d_log == pytest.approx(d, rel=1e-9)
    assert p_log == pytest.approx(p, rel=1e-9)


# ---------- bundled tables ----------

# half a unit in the last printed decimal of the published KS column
KS_TOLERANCE = {"carbon_fibers": 0.005, "growth_hormone": 0.0005, "wheaton_river": 0.0005}


@pytest.mark.parametrize("name", sorted(KS_TOLERANCE))
def test_published_estimates_reproduce_tables(name):
    entry = bundled_manifest()[name]
    if not entry.confirmed:
        pytest.skip(f"{name} values are not confirmed against the primary source")
    values = load_bundled(name).values
    rows = [row for row in entry.table if row.model == "BWeibull"]
    assert len(rows) == 2
    for row in rows:
        g = goodness_of_fit(values, BWeibull.of(row.alpha, row.beta, row.delta), Convention.PUBLISHED)
        assert g.ks_stat == pytest.approx(row.ks, abs=KS_TOLERANCE[name])
        assert g.cvm_pvalue == pytest.approx(row.cvm_pvalue, abs=5e-4)


@pytest.mark.parametrize(
    "name, estimator, tol",
    [
        ("carbon_fibers", "MLE", 5e-4),
        ("growth_hormone", "MLE", 1e-4),
        ("growth_hormone", "MLqE", 1e-4),
        ("wheaton_river", "MLE", 5e-4),
    ],
)
def test_published_cvm_statistics(name, estimator, tol):
    entry = bundled_manifest()[name]
    row = next(r for r in entry.table if r.model == "BWeibull" and r.estimator == estimator)
    t, _ = cvm_test(load_bundled(name).values, BWeibull.of(row.alpha, row.beta, row.delta), Convention.PUBLISHED)
    assert t == pytest.approx(row.cvm, abs=tol)


def test_carbon_table_values():
    row = next(r for r in bundled_manifest()["carbon_fibers"].table if r.model == "BWeibull" and r.q == 1.0)
    g = goodness_of_fit(load_bundled("carbon_fibers").values, BWeibull.of(row.alpha, row.beta, row.delta), "paper")
    assert g.convention == Convention.PUBLISHED
    assert g.ks_stat == pytest.approx(0.14, abs=0.005)
    assert g.cvm_pvalue == pytest.approx(0.1556, abs=5e-4)
