import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import stats

from wpmix.errors import ConfigurationError
from wpmix.harness import (
    GofReport,
    convergence_sweep,
    ecdf,
    kolmogorov_threshold,
    ks_distance,
    ks_two_sample,
    lemma1a_ratio,
    lemma1b_ratio,
    lemma1c_checks,
    sup_gap,
)
from wpmix.laws import beta_mixing, exponential_radial, pareto_radial, power_endpoint_radial, uniform_mixing
from wpmix.limits import kotz_limit, gumbel_sequence
from wpmix.mixture import make_model


def test_ks_matches_scipy(rng):
    x = rng.normal(size=3000)
    assert ks_distance(x, stats.norm.cdf) == pytest.approx(stats.kstest(x, stats.norm.cdf).statistic, abs=1e-15)
    y = rng.normal(0.1, 1.0, size=2000)
    assert ks_two_sample(x, y) == pytest.approx(stats.ks_2samp(x, y).statistic, abs=1e-15)


def test_ks_with_ties_matches_scipy():
    x = np.array([0.0, 0.0, 1.0, 1.0, 1.0, 2.0])
    y = np.array([0.0, 1.0, 2.0, 2.0])
    assert ks_two_sample(x, y) == pytest.approx(stats.ks_2samp(x, y).statistic)


def test_threshold_is_kolmogorov_quantile():
    assert kolmogorov_threshold(10_000) == pytest.approx(stats.kstwobign.isf(0.01) / 100.0)
    assert kolmogorov_threshold(100, 100) == pytest.approx(stats.kstwobign.isf(0.01) / math.sqrt(50))


def test_ecdf_and_sup_gap():
    F = ecdf([3.0, 1.0, 2.0, 2.0])
    assert F(0.5) == 0.0 and F(2.0) == 0.75 and F(3.0) == 1.0
    np.testing.assert_allclose(F(np.array([1.0, 2.5])), [0.25, 0.75])
    assert sup_gap(lambda t: t, lambda t: t**2, np.linspace(0, 1, 101)) == pytest.approx(0.25)
    with pytest.raises(ConfigurationError):
        ecdf([])


def test_report_threshold():
    assert GofReport("ks", 0.01, 100, 0.02).passed
    assert not GofReport("ks", 0.03, 100, 0.02).passed
    with pytest.raises(ConfigurationError):
        GofReport("ks", -1.0, 100, 0.02)


@given(y=st.floats(0.2, 5.0), z=st.floats(0.2, 5.0), u=st.floats(2.0, 1e4), gamma=st.floats(0.3, 4.0))
@settings(max_examples=25, deadline=None)
def test_power_law_ratio_is_exact_for_pareto(y, z, u, gamma):
    # exact once the integration range lies inside the Pareto support [1, inf)
    assume(u * max(y, z) >= 1.0)
    r = lemma1a_ratio(pareto_radial(1.0, gamma), beta_mixing(1.0, 1.7), y, z, u)
    assert r == pytest.approx(1.0, abs=1e-9)


def test_endpoint_ratio_converges():
    devs = [abs(lemma1b_ratio(power_endpoint_radial(2.0), beta_mixing(1.0, 1.5), 0.2, 1.0, 1.0, u) - 1.0)
            for u in (1e-1, 1e-2, 1e-3)]
    assert devs[0] > devs[1] > devs[2] and devs[2] < 0.02


def test_gumbel_vanish_value_matches_closed_form():
    # exponential law: (u w(u))^beta F_bar(mu u) / F_bar(u) = u^beta exp(-(mu - 1) u)
    vanish, _ = lemma1c_checks(exponential_radial(), beta_mixing(1.0, 1.5), 2.0, 2.0, 0.0, 30.0)
    assert vanish == pytest.approx(900.0 * math.exp(-30.0), rel=1e-12)


def test_gumbel_ratio_converges():
    devs = [abs(lemma1c_checks(exponential_radial(), beta_mixing(1.0, 1.5), 0.0, 2.0, 0.5, u)[1] - 1.0)
            for u in (10.0, 50.0, 200.0)]
    assert devs[0] > devs[1] > devs[2]


def test_ratio_checks_reject_wrong_domain():
    with pytest.raises(ConfigurationError):
        lemma1a_ratio(exponential_radial(), uniform_mixing(), 1.0, 1.0, 10.0)
    with pytest.raises(ConfigurationError):
        lemma1b_ratio(exponential_radial(), uniform_mixing(), 0.0, 1.0, 0.0, 1e-3)
    with pytest.raises(ConfigurationError):
        lemma1c_checks(pareto_radial(1.0, 1.0), uniform_mixing(), 0.0, 2.0, 0.0, 10.0)


def test_sweep_rows():
    radial = exponential_radial()
    model = make_model([1], 2, 2.0, radial, beta_mixing(1.0, 1.5))
    rows = convergence_sweep(model, [5.0, 20.0], kotz_limit(1.5, 2.0), gumbel_sequence(radial, 2.0), grid_size=50)
    assert [r.level for r in rows] == [5.0, 20.0]
    assert rows[0].scale == pytest.approx(5.0 ** -0.5)
    assert rows[1].sup_gap < rows[0].sup_gap
