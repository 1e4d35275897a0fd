"""The W_p scale mixture model ``X = A S`` and its samplers.

``S_I = R W U_I`` and ``S_J = R W_p U_J`` with ``W = (1 - W_p^p)^(1/p)``; the
four factors are independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _numeric
from .errors import ConfigurationError
from .geometry import (
    IndexPartition,
    NormSpec,
    SphereSampler,
    _check_conditioning,
    make_partition,
    sample_sphere,
)
from .laws import MixingLaw, RadialLaw
from .rng import RandomStream

__all__ = [
    "WpMixtureModel",
    "BivariateModel",
    "MixtureDraw",
    "make_model",
    "sample_mixture",
    "sample_bivariate",
    "complement_power",
    "product_sf",
    "log_product_sf",
    "marginal_cdf_X",
    "marginal_sf_X",
    "marginal_quantile_X",
]


def complement_power(wp, p: float):
    """``W = (1 - W_p^p)^(1/p)``, computed without cancellation near ``W_p = 1``."""
    wp = np.asarray(wp, dtype=float)
    with np.errstate(divide="ignore"):
        om = -np.expm1(p * np.log(wp))
    return np.clip(om, 0.0, 1.0) ** (1.0 / p)


@dataclass(frozen=True, eq=False)
class WpMixtureModel:
    partition: IndexPartition
    p: float
    A: np.ndarray
    radial: RadialLaw
    mixing: MixingLaw
    sphere_I: SphereSampler
    sphere_J: SphereSampler

    def __post_init__(self):
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ConfigurationError(f"p must be positive, got {self.p}")
        A = np.asarray(self.A, dtype=float)
        d = self.partition.d
        if A.shape != (d, d):
            raise ConfigurationError(f"A must be {d}x{d}, got shape {A.shape}")
        object.__setattr__(self, "A", A)
        if self.sphere_I.dim != self.partition.m or self.sphere_J.dim != d - self.partition.m:
            raise ConfigurationError("sphere sampler dimensions do not match the partition")

    def block(self, rows: str, cols: str) -> np.ndarray:
        idx = {"I": self.partition.I0, "J": self.partition.J0}
        return self.A[np.ix_(idx[rows], idx[cols])]

    @property
    def A_II(self):
        return self.block("I", "I")

    @property
    def A_IJ(self):
        return self.block("I", "J")

    @property
    def A_JI(self):
        return self.block("J", "I")

    @property
    def A_JJ(self):
        return self.block("J", "J")

    @property
    def norm_I(self) -> NormSpec:
        return self.sphere_I.norm

    @property
    def norm_J(self) -> NormSpec:
        return self.sphere_J.norm

    def check_conditional(self) -> None:
        """Raise unless the ``A_JI = 0``, invertible ``A_JJ`` hypotheses hold."""
        if np.any(self.A_JI != 0.0):
            raise ConfigurationError("conditional laws need A_JI = 0")
        _check_conditioning(self.A_JJ, "A_JJ")


def make_model(I, d: int, p: float, radial: RadialLaw, mixing: MixingLaw, A=None, *,
               q_I: float = 2.0, q_J: float = 2.0, plus_prob_I: float = 0.5,
               plus_prob_J: float = 0.5) -> WpMixtureModel:
    """Convenience constructor; ``A`` defaults to the identity."""
    part = make_partition(I, d)
    A = np.eye(d) if A is None else np.asarray(A, dtype=float)
    return WpMixtureModel(
        partition=part,
        p=float(p),
        A=A,
        radial=radial,
        mixing=mixing,
        sphere_I=SphereSampler(part.m, NormSpec(q_I), plus_prob_I),
        sphere_J=SphereSampler(d - part.m, NormSpec(q_J), plus_prob_J),
    )


class MixtureDraw(NamedTuple):
    X: np.ndarray
    S: np.ndarray
    R: np.ndarray
    Wp: np.ndarray
    U_I: np.ndarray
    U_J: np.ndarray


def sample_mixture(model: WpMixtureModel, n: int, rng: RandomStream, *,
                   return_parts: bool = False):
    """Draw ``n`` rows of ``X = A S``.

    Draw order is fixed (R, W_p, U_I, U_J) so equal streams give equal samples.
    """
    n = int(n)
    if n < 1:
        raise ConfigurationError("sample size must be at least 1")
    R = model.radial.sample(n, rng)
    Wp = model.mixing.sample(n, rng)
    U_I = sample_sphere(model.sphere_I, rng, n)
    U_J = sample_sphere(model.sphere_J, rng, n)
    W = complement_power(Wp, model.p)
    S = np.empty((n, model.partition.d))
    S[:, model.partition.I0] = (R * W)[:, None] * U_I
    S[:, model.partition.J0] = (R * Wp)[:, None] * U_J
    X = S @ model.A.T
    if return_parts:
        return MixtureDraw(X, S, R, Wp, U_I, U_J)
    return X


@dataclass(frozen=True, eq=False)
class BivariateModel:
    """``X = R I_1 W_p`` and ``Y = rho X + (1 - |rho|^p)^(1/p) R I_2 W``.

    The conditioned coordinate ``X`` carries the g-distributed factor ``W_p``,
    so this is the mixture model with ``J = {1}``, ``I = {2}`` and
    ``A = [[1, 0], [rho, (1 - |rho|^p)^(1/p)]]``.
    """

    rho: float
    p: float
    radial: RadialLaw
    mixing: MixingLaw
    q1: float = 0.5
    q2: float = 0.5

    def __post_init__(self):
        if not -1.0 < self.rho < 1.0:
            raise ConfigurationError(f"rho must lie in (-1, 1), got {self.rho}")
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ConfigurationError(f"p must be positive, got {self.p}")
        for name in ("q1", "q2"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ConfigurationError(f"{name} must lie in (0, 1], got {v}")

    @property
    def orth_scale(self) -> float:
        return (1.0 - abs(self.rho) ** self.p) ** (1.0 / self.p)

    @property
    def A(self) -> np.ndarray:
        return np.array([[1.0, 0.0], [self.rho, self.orth_scale]])

    def to_mixture(self) -> WpMixtureModel:
        return WpMixtureModel(
            partition=make_partition([2], 2),
            p=self.p,
            A=self.A,
            radial=self.radial,
            mixing=self.mixing,
            sphere_I=SphereSampler(1, NormSpec(2.0), self.q2),
            sphere_J=SphereSampler(1, NormSpec(2.0), self.q1),
        )


def sample_bivariate(model: BivariateModel, n: int, rng: RandomStream) -> np.ndarray:
    """Draw ``n`` pairs ``(X, Y)`` as an ``(n, 2)`` array.

    Uses the same draw order as :func:`sample_mixture` on
    :meth:`BivariateModel.to_mixture`, so equal streams give equal pairs.
    """
    n = int(n)
    if n < 1:
        raise ConfigurationError("sample size must be at least 1")
    R = model.radial.sample(n, rng)
    Wp = model.mixing.sample(n, rng)
    I2 = np.where(rng.random((n, 1)) < model.q2, 1.0, -1.0)[:, 0]
    I1 = np.where(rng.random((n, 1)) < model.q1, 1.0, -1.0)[:, 0]
    X = R * I1 * Wp
    Y = model.rho * X + model.orth_scale * R * I2 * complement_power(Wp, model.p)
    return np.column_stack([X, Y])


def log_product_sf(radial: RadialLaw, mixing: MixingLaw, x: float) -> float:
    """``log P(R W_p > x)`` for ``x >= 0`` by quadrature.

    Uses ``P(R W_p > x) = int_x^{x_F} (1 - G(x/r)) dF(r)``.
    """
    x = float(x)
    if x <= 0.0:
        return 0.0
    if x >= radial.upper:
        return -math.inf
    start = max(x, radial.lower)
    ref = float(radial.logsf(start))

    def fun(r, gap=None):
        lf = radial.logpdf(r) if gap is None else radial.logpdf_gap(gap)
        with np.errstate(under="ignore"):
            return mixing.sf(x / r, (r - x) / r) * np.exp(lf - ref)

    hz = float(radial.hazard(start))
    length = 1.0 / hz if hz > 0 else 1.0
    if math.isfinite(radial.upper):
        length = min(length, radial.upper - start)
    # 1 - G(x/r) vanishes like (r - x)^alpha at r = x
    lower_exp = mixing.alpha if (start == x and mixing.alpha is not None) else 0.0
    val = _numeric.quad_split(fun, start, radial.upper, length, singular_exponent=lower_exp,
                              upper_exponent=radial.endpoint_exponent)
    if val <= 0.0:
        return -math.inf
    return ref + math.log(val)


def product_sf(radial: RadialLaw, mixing: MixingLaw, x: float) -> float:
    return math.exp(log_product_sf(radial, mixing, x))


def marginal_sf_X(model: BivariateModel, x: float) -> float:
    """``P(X > x)`` for ``X = R I_1 W_p``."""
    x = float(x)
    if x >= 0.0:
        return model.q1 * product_sf(model.radial, model.mixing, x)
    return 1.0 - (1.0 - model.q1) * product_sf(model.radial, model.mixing, -x)


def marginal_cdf_X(model: BivariateModel, x: float) -> float:
    """``H(x) = P(X <= x)`` for ``X = R I_1 W_p`` by quadrature."""
    x = float(x)
    if x >= 0.0:
        return 1.0 - model.q1 * product_sf(model.radial, model.mixing, x)
    return (1.0 - model.q1) * product_sf(model.radial, model.mixing, -x)


def marginal_quantile_X(model: BivariateModel, prob: float) -> float:
    """``H^{-1}(prob)`` for ``prob > 1 - q1`` (the positive half-line).

    Solved on the log-survival scale, so levels like ``1 - 1e-8`` keep full
    relative accuracy.
    """
    tail = 1.0 - prob
    if not 0.0 < tail < model.q1:
        raise ConfigurationError(f"quantile level {prob} outside the positive half-line")
    return product_quantile(model.radial, model.mixing, tail / model.q1)


def product_quantile(radial: RadialLaw, mixing: MixingLaw, tail: float) -> float:
    """``x`` with ``P(R W_p > x) = tail``."""
    target = math.log(tail)

    def fun(x):
        return log_product_sf(radial, mixing, x) - target

    hi_cap = radial.upper
    guess = float(radial.isf(tail))
    lo = 0.0
    hi = guess if math.isfinite(hi_cap) else max(guess, 1e-300)
    if fun(hi) > 0:
        hi = _numeric.expand_bracket(fun, lo, hi, upper_limit=hi_cap)
    return _numeric.brentq(fun, 0.0, hi, rtol=1e-13)
