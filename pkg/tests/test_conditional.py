import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from wpmix.conditional import (
    MIN_SLAB_BUDGET,
    ConditionalLaw,
    cond_cdf,
    cond_quantile,
    cond_sample,
    conditional_radii,
    conditional_shift,
    make_conditional,
    slab_conditional_oracle,
)
from wpmix.errors import ConfigurationError, InconclusiveOracleError
from wpmix.laws import beta_mixing, exponential_radial, pareto_radial, power_endpoint_radial, uniform_mixing
from wpmix.mixture import make_model
from wpmix.rng import substream


def mp_conditional_cdf(tau, p, a, alpha, z):
    """Exponential radius with a Beta(a, alpha) mixing law, by mpmath quadrature."""
    mpmath.mp.dps = 30
    B = mpmath.beta(a, alpha)

    def integrand(r):
        w = tau / r
        return w ** (a - 1) * (1 - w) ** (alpha - 1) / B / r * mpmath.exp(-r)

    s = (mpmath.mpf(tau) ** p + mpmath.mpf(z) ** p) ** (1 / mpmath.mpf(p))
    total = mpmath.quad(integrand, [tau, tau + 1, mpmath.inf])
    upper = mpmath.quad(integrand, [s, s + 1, mpmath.inf])
    return float(1 - upper / total)


def test_exponential_uniform_closed_form():
    law = make_conditional(make_model([1], 2, 1.0, exponential_radial(), uniform_mixing()), [1.0])
    oracle = float(1 - mpmath.e1(2) / mpmath.e1(1))
    assert cond_cdf(law, 1.0) == pytest.approx(oracle, abs=1e-12)
    assert law.norm_const == pytest.approx(float(mpmath.e1(1)), rel=1e-12)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("alpha", [0.4, 1.5])
def test_cdf_against_mpmath(p, alpha):
    law = ConditionalLaw(1.5, exponential_radial(), beta_mixing(1.0, alpha), p)
    z = np.array([0.05, 0.4, 1.0, 3.0])
    expected = [mp_conditional_cdf(1.5, p, 1.0, alpha, v) for v in z]
    np.testing.assert_allclose(law.cdf(z), expected, atol=1e-10)


def test_array_and_scalar_cdf_agree():
    law = ConditionalLaw(2.0, exponential_radial(), beta_mixing(2.0, 1.5), 2.0)
    z = np.linspace(0.0, 6.0, 25)
    np.testing.assert_allclose(law.cdf(z), [law.cdf(v) for v in z], atol=1e-13)
    np.testing.assert_allclose(law.cdf(z) + law.sf(z), 1.0, atol=1e-13)


@pytest.mark.parametrize("radial,mixing,tau", [
    (exponential_radial(), beta_mixing(1.0, 1.5), 1.0),
    (power_endpoint_radial(0.7), beta_mixing(1.0, 0.6), 0.9),
    (pareto_radial(1.0, 1.0), uniform_mixing(), 3.0),
])
def test_density_integrates_to_cdf(radial, mixing, tau):
    law = ConditionalLaw(tau, radial, mixing, 2.0)
    z1 = law.quantile(0.3)
    z2 = law.quantile(0.9)
    val, _ = integrate.quad(law.pdf, z1, z2, limit=200)
    assert val == pytest.approx(0.6, abs=1e-7)


def test_finite_endpoint_support():
    law = ConditionalLaw(0.6, power_endpoint_radial(2.0), beta_mixing(1.0, 1.5), 2.0)
    assert law.upper == pytest.approx(0.8)
    assert law.cdf(0.8) == pytest.approx(1.0)
    assert law.pdf(0.81) == 0.0


@given(tau=st.floats(0.05, 20.0), p=st.floats(0.5, 4.0), alpha=st.floats(0.3, 3.0))
@settings(max_examples=25, deadline=None)
def test_cdf_is_a_distribution_function(tau, p, alpha):
    law = ConditionalLaw(tau, exponential_radial(), beta_mixing(1.0, alpha), p)
    z = np.concatenate([[0.0], np.geomspace(1e-4, 50.0, 40) * max(tau, 1.0) ** (1 - 1 / p)])
    F = law.cdf(z)
    assert F[0] == 0.0
    assert np.all(np.diff(F) >= -1e-13)
    assert np.all((F >= 0) & (F <= 1))


@given(prob=st.floats(1e-6, 1 - 1e-6))
@settings(max_examples=25, deadline=None)
def test_quantile_inverts_cdf(prob):
    law = ConditionalLaw(1.0, exponential_radial(), beta_mixing(1.0, 1.5), 1.0)
    assert law.cdf(law.quantile(prob)) == pytest.approx(prob, abs=1e-12)


def test_vector_quantile_shape():
    law = ConditionalLaw(1.0, exponential_radial(), beta_mixing(1.0, 1.5), 1.0)
    assert cond_quantile(law, np.array([[0.1, 0.5]])).shape == (1, 2)


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_table_sampler_follows_cdf(p):
    law = ConditionalLaw(1.0, exponential_radial(), beta_mixing(1.0, 1.5), p)
    x = law.sample(100_000, substream(1, "table"))
    assert stats.kstest(x, law.cdf).statistic < 0.006


def test_conditional_sample_geometry():
    A = [[1.0, 0.3, 0.5], [0.0, 1.0, 0.2], [0.0, 0.0, 2.0]]
    model = make_model([1, 2], 3, 2.0, exponential_radial(), beta_mixing(1.0, 1.5), A)
    law = make_conditional(model, [1.0])
    assert law.tau == pytest.approx(0.5)
    np.testing.assert_allclose(conditional_shift(model, [1.0]), [0.25, 0.1])
    X = cond_sample(model, [1.0], 20_000, substream(2, "c"), law=law)
    radii = conditional_radii(model, [1.0], X)
    assert stats.kstest(radii, law.cdf).pvalue > 1e-3


def test_invalid_conditioning():
    model = make_model([1], 2, 2.0, power_endpoint_radial(1.0), beta_mixing(1.0, 1.5))
    with pytest.raises(ConfigurationError):
        make_conditional(model, [1.5])
    with pytest.raises(ConfigurationError):
        make_conditional(model, [0.5, 0.1])
    with pytest.raises(ConfigurationError):
        ConditionalLaw(0.0, exponential_radial(), beta_mixing(1.0, 1.0), 1.0)


def test_slab_budget_and_inconclusive_oracle():
    model = make_model([1], 2, 1.0, exponential_radial(), beta_mixing(1.0, 1.5))
    with pytest.raises(ConfigurationError):
        slab_conditional_oracle(model, [1.0], 0.1, MIN_SLAB_BUDGET - 1, substream(0))
    with pytest.raises(InconclusiveOracleError):
        slab_conditional_oracle(model, [1.0], 1e-6, MIN_SLAB_BUDGET, substream(0))


def test_slab_shrink_is_nested():
    model = make_model([1], 2, 1.0, exponential_radial(), beta_mixing(1.0, 1.5))
    wide = slab_conditional_oracle(model, [1.0], 0.2, 200_000, substream(0, "slab"))
    narrow = wide.shrink(0.05)
    assert narrow.count < wide.count and narrow.proposals == wide.proposals
    assert np.all(narrow.distance <= 0.05)
    with pytest.raises(ConfigurationError):
        wide.shrink(0.3)
