import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from wpmix.concomitants import (
    ConcomitantExperiment,
    concomitant_extract,
    eta_limit_cdf,
    normalizing_constants,
    orderstat_limit_cdf,
    run_concomitant_experiment,
    thread_count,
    top_order_statistics,
)
from wpmix.errors import ConfigurationError
from wpmix.laws import beta_mixing, exponential_radial, kotz3_radial, pareto_radial, power_beta_mixing
from wpmix.mixture import BivariateModel


def test_extract_picks_partners_of_largest():
    pairs = np.array([[1.0, 10.0], [5.0, 50.0], [3.0, 30.0], [4.0, 40.0]])
    np.testing.assert_array_equal(concomitant_extract(pairs, 2), [50.0, 40.0])


def test_ties_rank_later_index_higher():
    pairs = np.array([[2.0, 0.0], [7.0, 1.0], [7.0, 2.0], [7.0, 3.0], [1.0, 4.0]])
    np.testing.assert_array_equal(concomitant_extract(pairs, 2), [3.0, 2.0])
    xs, ys = top_order_statistics(pairs, 4)
    np.testing.assert_array_equal(xs, [7.0, 7.0, 7.0, 2.0])
    np.testing.assert_array_equal(ys, [3.0, 2.0, 1.0, 0.0])


@given(x=st.lists(st.integers(0, 5), min_size=3, max_size=40), data=st.data())
@settings(max_examples=60, deadline=None)
def test_top_indices_match_stable_sort(x, data):
    k = data.draw(st.integers(1, len(x) - 1))
    pairs = np.column_stack([np.asarray(x, float), np.arange(len(x), dtype=float)])
    expected = np.argsort(np.asarray(x, float), kind="stable")[::-1][:k]
    np.testing.assert_array_equal(concomitant_extract(pairs, k), expected)


def test_extract_validation():
    with pytest.raises(ConfigurationError):
        concomitant_extract(np.zeros((3, 3)), 1)
    with pytest.raises(ConfigurationError):
        concomitant_extract(np.zeros((3, 2)), 3)


def test_eta_gaussian_case():
    x = np.linspace(-4, 4, 81)
    np.testing.assert_allclose(eta_limit_cdf(0.5, 2.0, 0.5, x), stats.norm.cdf(x), atol=1e-14)


@given(alpha=st.floats(0.2, 5.0), p=st.floats(0.5, 4.0), x=st.floats(0.0, 10.0))
@settings(max_examples=50, deadline=None)
def test_eta_symmetry_and_one_sided_case(alpha, p, x):
    assert eta_limit_cdf(alpha, p, 0.5, -x) == pytest.approx(1.0 - eta_limit_cdf(alpha, p, 0.5, x), abs=1e-14)
    assert eta_limit_cdf(alpha, p, 1.0, -x) == 0.0


def test_orderstat_limits():
    x = np.linspace(-2, 5, 15)
    lam = np.exp(-np.exp(-x))
    np.testing.assert_allclose(orderstat_limit_cdf(1, x), lam, rtol=1e-13)
    np.testing.assert_allclose(orderstat_limit_cdf(2, x), lam * (1 + np.exp(-x)), rtol=1e-13)
    with pytest.raises(ConfigurationError):
        orderstat_limit_cdf(0, 1.0)


@pytest.mark.parametrize("n", [10**4, 10**6, 10**8])
def test_gaussian_normalizing_constants(n):
    rho = 0.6
    model = BivariateModel(rho, 2.0, kotz3_radial(1.0, 0.0, 0.5, 2.0), power_beta_mixing(2.0, 0.5, 0.5))
    c = normalizing_constants(model, n)
    assert c.b_n == pytest.approx(stats.norm.ppf(1 - 1 / n), rel=1e-9)
    assert c.A_n == pytest.approx(math.sqrt(1 - rho**2), rel=1e-12)
    assert c.B_n == pytest.approx(rho * c.b_n)
    assert c.a_n == pytest.approx(1 / c.b_n)


def _model(rho=0.5):
    return BivariateModel(rho, 2.0, kotz3_radial(1e30, 0.0, 1.0, 1.0), beta_mixing(1.0, 1.0))


def test_experiment_validation():
    with pytest.raises(ConfigurationError):
        ConcomitantExperiment(_model(), 100, 100, 10, 0)
    with pytest.raises(ConfigurationError):
        ConcomitantExperiment(_model(), 100, 2, 0, 0)
    with pytest.raises(ConfigurationError):
        ConcomitantExperiment(BivariateModel(0.5, 1.0, exponential_radial(), beta_mixing(1.0, 1.0)), 100, 2, 10, 0)
    with pytest.raises(ConfigurationError):
        ConcomitantExperiment(BivariateModel(0.0, 2.0, pareto_radial(1.0, 1.0), beta_mixing(1.0, 1.0)), 100, 2, 10, 0)


def test_results_independent_of_threads():
    exp = ConcomitantExperiment(_model(), 500, 3, 30, 9)
    a = run_concomitant_experiment(exp, threads=1)
    b = run_concomitant_experiment(exp, threads=4)
    np.testing.assert_array_equal(a.eta, b.eta)
    np.testing.assert_array_equal(a.xi, b.xi)


def test_concomitants_factor_from_order_statistics():
    # with rho = 0 the normalized concomitants are asymptotically independent
    # of the normalized order statistics and follow the symmetric limit law
    exp = ConcomitantExperiment(_model(rho=0.0), 2000, 2, 2000, 3)
    rep = run_concomitant_experiment(exp)
    assert all(abs(c) < 0.06 for c in rep.cross_correlation())
    assert max(rep.marginal_ks()) < 0.05
    assert max(rep.orderstat_ks()) < 0.05
    summary = rep.summary()
    assert summary["reps"] == 2000 and len(summary["marginal_ks"]) == 2


def test_thread_count_env(monkeypatch):
    monkeypatch.delenv("WPMIX_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("WPMIX_THREADS", "3")
    assert thread_count() == 3
    for bad in ("0", "x"):
        monkeypatch.setenv("WPMIX_THREADS", bad)
        with pytest.raises(ConfigurationError):
            thread_count()
