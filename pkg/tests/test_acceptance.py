"""Numbered acceptance criteria; one summary line per criterion is printed at the end."""
import math

import mpmath
import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from wpmix.acceptance import CRITERIA, DEFAULT_SEED, format_result
from wpmix.conditional import make_conditional
from wpmix.concomitants import eta_limit_cdf
from wpmix.laws import exponential_radial, uniform_mixing
from wpmix.limits import frechet_limit
from wpmix.mixture import make_model


def run(number):
    res = CRITERIA[number](DEFAULT_SEED)
    line = format_result(res)
    print(line)
    ACCEPTANCE_LINES.append(line)
    return res


def assert_passed(res):
    failed = [c for c in res.checks if not c.passed]
    assert not failed, f"criterion {res.number}: {failed}"


def test_criterion_01_norm_identity():
    assert_passed(run(1))


@pytest.mark.slow
def test_criterion_02_slab_oracle():
    assert_passed(run(2))


def test_criterion_03_closed_form_conditional():
    # independent oracle: arbitrary-precision exponential integrals
    mpmath.mp.dps = 30
    oracle = float(1 - mpmath.e1(2) / mpmath.e1(1))
    assert oracle == pytest.approx(0.7771, abs=1e-4)
    law = make_conditional(make_model([1], 2, 1.0, exponential_radial(), uniform_mixing()), [1.0])
    assert abs(law.cdf(1.0) - oracle) <= 1e-8
    assert_passed(run(3))


def test_criterion_04_gumbel_sweep():
    assert_passed(run(4))


def test_criterion_05_gaussian_case():
    # independent oracle: the error function from the standard library
    x = np.linspace(-4.0, 4.0, 801)
    gauss = np.array([0.5 * (1.0 + math.erf(v / math.sqrt(2.0))) for v in x])
    assert np.max(np.abs(eta_limit_cdf(0.5, 2.0, 0.5, x) - gauss)) <= 1e-3
    assert_passed(run(5))


def test_criterion_06_weibull_sweep():
    assert_passed(run(6))


def test_criterion_07_frechet_case():
    z = np.linspace(0.0, 10.0, 41)
    for p in (1.0, 2.0):
        closed = 1.0 - (1.0 + z**p) ** (-2.0 / p)
        assert np.max(np.abs(frechet_limit(1.0, 1.0, uniform_mixing(), p).cdf(z) - closed)) <= 1e-8
    assert_passed(run(7))


@pytest.mark.slow
def test_criterion_08_exceedance_limits():
    assert_passed(run(8))


def test_criterion_09_tail_ratios():
    assert_passed(run(9))


@pytest.mark.slow
def test_criterion_10_concomitants():
    assert_passed(run(10))


def test_criterion_11_determinism():
    assert_passed(run(11))
