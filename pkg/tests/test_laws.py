import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import integrate, stats

from wpmix.errors import ConfigurationError
from wpmix.laws import (
    FRECHET,
    GUMBEL,
    WEIBULL,
    beta_mixing,
    exponential_radial,
    finite_endpoint_radial,
    kotz3_radial,
    pareto_radial,
    point_mass_mixing,
    power_beta_mixing,
    power_endpoint_radial,
    spherical_mixing,
    uniform_mixing,
)

RADIALS = [
    exponential_radial(),
    kotz3_radial(2.0, 1.5, 0.7, 1.3),
    kotz3_radial(0.5, -1.0, 1.0, 2.0),
    finite_endpoint_radial(1.0, 1.0, 1.0, 2.0),
    pareto_radial(1.0, 2.5),
    power_endpoint_radial(0.6),
]


def test_exponential_is_unit_exponential():
    law = exponential_radial()
    x = np.linspace(0.0, 30.0, 61)
    np.testing.assert_allclose(law.sf(x), np.exp(-x), rtol=1e-14)
    np.testing.assert_allclose(law.pdf(x[1:]), np.exp(-x[1:]), rtol=1e-14)
    assert law.scaling(7.0) == 1.0 and law.mda == GUMBEL


def test_kotz_with_large_constant_is_shifted_exponential():
    law = kotz3_radial(math.e**2, 0.0, 1.0, 1.0)
    assert law.lower == pytest.approx(2.0)
    np.testing.assert_allclose(law.sf([2.5, 4.0]), np.exp(-np.array([0.5, 2.0])), rtol=1e-13)
    assert law.sf(1.0) == 1.0


def test_kotz_that_never_reaches_one_is_rejected():
    with pytest.raises(ConfigurationError):
        kotz3_radial(1e-3, 0.1, 5.0, 1.0)


def test_pareto_and_power_endpoint_closed_forms():
    par = pareto_radial(4.0, 2.0)
    assert par.lower == 2.0 and par.mda == FRECHET
    assert par.sf(8.0) == pytest.approx(4.0 / 64.0)
    pe = power_endpoint_radial(3.0)
    assert pe.mda == WEIBULL and pe.upper == 1.0
    assert pe.cdf(0.5) == pytest.approx(1.0 - 0.125)
    assert pe.logpdf_gap(1e-300) == pytest.approx(math.log(3.0) + 2.0 * math.log(1e-300))


@pytest.mark.parametrize("law", RADIALS, ids=repr)
def test_density_integrates_to_distribution(law):
    lo = law.lower + 1e-3
    hi = float(law.ppf(0.99))
    val, _ = integrate.quad(lambda x: float(law.pdf(x)), lo, hi, limit=200)
    assert val == pytest.approx(float(law.sf(lo) - law.sf(hi)), rel=1e-7)


@pytest.mark.parametrize("law", RADIALS, ids=repr)
@given(v=st.floats(1e-12, 1.0 - 1e-9))
@settings(max_examples=40, deadline=None)
def test_isf_inverts_survival(law, v):
    x = float(law.isf(v))
    # near a finite endpoint the quantile may round to x_F itself
    assume(math.isinf(law.upper) or law.upper - x > 1e-9 * law.upper)
    assert float(law.sf(x)) == pytest.approx(v, rel=1e-8)


@pytest.mark.parametrize("law", RADIALS, ids=repr)
def test_samples_follow_cdf(law, rng):
    x = law.sample(20_000, rng)
    assert stats.kstest(x, lambda t: law.cdf(t)).pvalue > 1e-3


def test_finite_endpoint_scaling_and_range():
    law = finite_endpoint_radial(1.0, 2.0, 0.5, 1.0)
    assert law.scaling(0.75) == pytest.approx(2.0 * 0.5 * 0.25**-1.5)
    with pytest.raises(ConfigurationError):
        law.scaling(1.0)


MIXINGS = [beta_mixing(2.0, 1.5), uniform_mixing(), power_beta_mixing(2.0, 0.5, 0.5), spherical_mixing(5, 2)]


@pytest.mark.parametrize("g", MIXINGS, ids=repr)
def test_mixing_density_and_cdf_agree(g):
    total, _ = integrate.quad(lambda w: float(g.pdf(w)), 0.0, 1.0, limit=200)
    assert total == pytest.approx(1.0, rel=1e-7)
    part, _ = integrate.quad(lambda w: float(g.pdf(w)), 0.0, 0.3, limit=200)
    assert part == pytest.approx(float(g.cdf(0.3)), rel=1e-7)
    assert float(g.sf(0.3)) == pytest.approx(1.0 - float(g.cdf(0.3)), rel=1e-12)


@pytest.mark.parametrize("g", MIXINGS, ids=repr)
def test_mixing_samples(g, rng):
    assert stats.kstest(g.sample(20_000, rng), lambda w: g.cdf(w)).pvalue > 1e-3


def test_mixing_index_at_one():
    assert beta_mixing(2.0, 1.5).alpha == 1.5
    assert spherical_mixing(5, 2).alpha == 1.0
    # regular variation: g(1 - t) / t^(alpha - 1) converges
    g = power_beta_mixing(3.0, 2.0, 0.5)
    r = [float(g.pdf(1 - t, t)) * t ** (1 - g.alpha) for t in (1e-6, 1e-9)]
    assert r[0] == pytest.approx(r[1], rel=1e-5)


def test_point_mass_has_no_density(rng):
    g = point_mass_mixing(0.3)
    np.testing.assert_array_equal(g.sample(4, rng), 0.3)
    with pytest.raises(ConfigurationError):
        g.pdf(0.3)
    with pytest.raises(ConfigurationError):
        point_mass_mixing(1.5)


def test_spherical_mixing_validates():
    with pytest.raises(ConfigurationError):
        spherical_mixing(3, 3)
