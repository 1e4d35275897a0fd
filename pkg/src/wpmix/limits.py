"""Limit laws of the conditional radius and the joint exceedance limits.

Three regimes, keyed by the max-domain of attraction of the radial law:

* Gumbel: ``h R*`` tends to ``R_alpha`` with ``R_alpha^p ~ Gamma(alpha, rate 1/p)``.
* Weibull (``x_F = 1``): ``(p a_n)^(-1/p) R*`` tends to a variable whose p-th
  power is ``Beta(alpha, gamma)``.
* Frechet: ``a_n R*`` at level ``c / a_n`` tends to ``Q_{M,g,c}`` with ``M``
  the Pareto law with index ``gamma`` started at ``c``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .conditional import ConditionalLaw, cond_cdf, cond_quantile
from .errors import ConfigurationError
from .geometry import SphereSampler, sample_sphere
from .laws import FRECHET, GUMBEL, WEIBULL, MixingLaw, RadialLaw, pareto_radial
from .mixture import WpMixtureModel, product_quantile, sample_mixture
from .rng import RandomStream

__all__ = [
    "LimitLaw",
    "KotzGammaLimit",
    "WeibullBetaLimit",
    "FrechetQLimit",
    "kotz_limit",
    "weibull_limit",
    "frechet_limit",
    "gumbel_scaling_h",
    "NormalizingSequence",
    "gumbel_sequence",
    "weibull_sequence",
    "frechet_sequence",
    "joint_gumbel_limit_sample",
    "joint_weibull_limit_sample",
    "ExceedanceSample",
    "exceedance_experiment",
    "joint_limit_sample",
]


def _positive(**params):
    for name, value in params.items():
        if not (value > 0 and math.isfinite(value)):
            raise ConfigurationError(f"{name} must be positive and finite, got {value}")


class LimitLaw:
    """A limiting radius law with vectorized ``cdf``, ``quantile`` and ``sample``."""

    kind: str = ""

    def cdf(self, z):
        raise NotImplementedError

    def quantile(self, prob):
        raise NotImplementedError

    def sample(self, n: int, rng: RandomStream) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


class KotzGammaLimit(LimitLaw):
    """``R^p ~ Gamma(alpha, rate 1/p)`` on ``(0, inf)``."""

    kind = "kotz_gamma"

    def __init__(self, alpha: float, p: float):
        _positive(alpha=alpha, p=p)
        self.alpha, self.p = float(alpha), float(p)

    def params(self):
        return {"alpha": self.alpha, "p": self.p}

    def cdf(self, z):
        z = np.maximum(np.asarray(z, dtype=float), 0.0)
        return _out(special.gammainc(self.alpha, z**self.p / self.p))

    def sf(self, z):
        z = np.maximum(np.asarray(z, dtype=float), 0.0)
        return _out(special.gammaincc(self.alpha, z**self.p / self.p))

    def quantile(self, prob):
        return _out((self.p * special.gammaincinv(self.alpha, np.asarray(prob, dtype=float))) ** (1.0 / self.p))

    def sample(self, n, rng):
        return (self.p * rng.standard_gamma(self.alpha, size=int(n))) ** (1.0 / self.p)


class WeibullBetaLimit(LimitLaw):
    """``R^p ~ Beta(alpha, gamma)`` on ``(0, 1)``."""

    kind = "weibull_beta"

    def __init__(self, alpha: float, gamma: float, p: float):
        _positive(alpha=alpha, gamma=gamma, p=p)
        self.alpha, self.gamma, self.p = float(alpha), float(gamma), float(p)

    def params(self):
        return {"alpha": self.alpha, "gamma": self.gamma, "p": self.p}

    def cdf(self, z):
        z = np.clip(np.asarray(z, dtype=float), 0.0, 1.0)
        return _out(special.betainc(self.alpha, self.gamma, z**self.p))

    def quantile(self, prob):
        return _out(special.betaincinv(self.alpha, self.gamma, np.asarray(prob, dtype=float)) ** (1.0 / self.p))

    def sample(self, n, rng):
        return rng.beta(self.alpha, self.gamma, size=int(n)) ** (1.0 / self.p)


class FrechetQLimit(LimitLaw):
    """The conditional law ``Q_{M,g,c}`` with Pareto ``M(s) = 1 - (c/s)^gamma``."""

    kind = "frechet_q"

    def __init__(self, c: float, gamma: float, mixing: MixingLaw, p: float):
        _positive(c=c, gamma=gamma, p=p)
        self.c, self.gamma, self.p = float(c), float(gamma), float(p)
        self.mixing = mixing
        self.radial = pareto_radial(self.c**self.gamma, self.gamma)
        self.law = ConditionalLaw(self.c, self.radial, mixing, self.p)

    def params(self):
        return {"c": self.c, "gamma": self.gamma, "mixing": self.mixing, "p": self.p}

    def cdf(self, z):
        return cond_cdf(self.law, z)

    def sf(self, z):
        return self.law.sf(z)

    def quantile(self, prob):
        return cond_quantile(self.law, prob)

    def sample(self, n, rng):
        return self.law.sample(n, rng)


def kotz_limit(alpha: float, p: float) -> KotzGammaLimit:
    return KotzGammaLimit(alpha, p)


def weibull_limit(alpha: float, gamma: float, p: float) -> WeibullBetaLimit:
    return WeibullBetaLimit(alpha, gamma, p)


def frechet_limit(c: float, gamma: float, mixing: MixingLaw, p: float) -> FrechetQLimit:
    return FrechetQLimit(c, gamma, mixing, p)


def gumbel_scaling_h(tau: float, p: float, w: Callable[[float], float]) -> float:
    """``h = (tau^(1-p) w(tau))^(1/p)``."""
    if not tau > 0:
        raise ConfigurationError(f"level must be positive, got {tau}")
    return float((tau ** (1.0 - p) * w(tau)) ** (1.0 / p))


@dataclass(frozen=True)
class NormalizingSequence:
    """Maps a level parameter ``x`` to the conditioning level and radius scale.

    ``x`` is the level ``tau`` itself in the Gumbel regime and the small
    constant ``a_n`` in the Weibull and Frechet regimes. The rescaled radius
    is ``scale(x) * R*`` at conditioning level ``level(x)``.
    """

    regime: str
    p: float
    w: Callable[[float], float] | None = None
    c: float = 1.0

    def __post_init__(self):
        if self.regime not in (GUMBEL, WEIBULL, FRECHET):
            raise ConfigurationError(f"unknown regime {self.regime!r}")
        if self.regime == GUMBEL and self.w is None:
            raise ConfigurationError("the Gumbel regime needs a scaling function")

    def level(self, x: float) -> float:
        if self.regime == GUMBEL:
            return float(x)
        if not 0.0 < x < (1.0 if self.regime == WEIBULL else math.inf):
            raise ConfigurationError(f"a_n must be positive (and below 1 for Weibull), got {x}")
        if self.regime == WEIBULL:
            return 1.0 - float(x)
        return self.c / float(x)

    def scale(self, x: float) -> float:
        if self.regime == GUMBEL:
            return gumbel_scaling_h(float(x), self.p, self.w)
        if self.regime == WEIBULL:
            return (self.p * float(x)) ** (-1.0 / self.p)
        return float(x)


def gumbel_sequence(radial: RadialLaw, p: float) -> NormalizingSequence:
    if radial.mda != GUMBEL:
        raise ConfigurationError("Gumbel normalization needs a Gumbel-domain radial law")
    return NormalizingSequence(GUMBEL, float(p), w=radial.scaling)


def weibull_sequence(p: float) -> NormalizingSequence:
    return NormalizingSequence(WEIBULL, float(p))


def frechet_sequence(c: float, p: float) -> NormalizingSequence:
    _positive(c=c)
    return NormalizingSequence(FRECHET, float(p), c=float(c))


def _indicator_p(p: float) -> float:
    return 1.0 if p == 1.0 else 0.0


def joint_gumbel_limit_sample(alpha: float, p: float, A_II, A_IJ, sphere_I: SphereSampler,
                              rng: RandomStream, n: int):
    """Draw ``n`` pairs ``(A_II R_alpha U_I + E 1_p A_IJ, E)`` with ``E ~ Exp(1)``.

    Returns an ``(n, m)`` array and an ``(n,)`` array.
    """
    A_II = np.atleast_2d(np.asarray(A_II, dtype=float))
    A_IJ = np.asarray(A_IJ, dtype=float).reshape(-1)
    radius = KotzGammaLimit(alpha, p).sample(n, rng)
    U = sample_sphere(sphere_I, rng, int(n))
    E = rng.standard_exponential(int(n))
    part = (radius[:, None] * U) @ A_II.T + _indicator_p(p) * E[:, None] * A_IJ
    return part, E


def joint_weibull_limit_sample(alpha: float, gamma: float, p: float, A_II, A_IJ,
                               sphere_I: SphereSampler, rng: RandomStream, n: int):
    """Draw ``n`` pairs ``(|E|^(1/p) (A_II R U_I - 1_p A_IJ), E)``.

    ``E`` lives on ``(-1, 0)`` with ``P(E <= x) = 1 - |x|^(alpha + gamma)``,
    so ``|E| = V^(1/(alpha + gamma))`` for a uniform ``V``.
    """
    A_II = np.atleast_2d(np.asarray(A_II, dtype=float))
    A_IJ = np.asarray(A_IJ, dtype=float).reshape(-1)
    radius = WeibullBetaLimit(alpha, gamma, p).sample(n, rng)
    U = sample_sphere(sphere_I, rng, int(n))
    # 1 - U keeps V in (0, 1] so |E| never hits zero
    absE = (1.0 - rng.random(int(n))) ** (1.0 / (alpha + gamma))
    inner = (radius[:, None] * U) @ A_II.T - _indicator_p(p) * A_IJ
    return absE[:, None] ** (1.0 / p) * inner, -absE


@dataclass
class ExceedanceSample:
    """Normalized exceedances ``(h (X_I - shift), scaled X_d excess)``."""

    regime: str
    part_I: np.ndarray
    part_J: np.ndarray
    level: float
    scale_I: float
    scale_J: float
    proposals: int

    @property
    def count(self) -> int:
        return len(self.part_J)


def _check_exceedance_model(model: WpMixtureModel) -> None:
    part = model.partition
    d = part.d
    if part.J != (d,):
        raise ConfigurationError("exceedance limits need I = {1..d-1} and J = {d}")
    if np.any(model.A_JI != 0.0):
        raise ConfigurationError("exceedance limits need A_JI = 0")
    if model.A_JJ[0, 0] != 1.0:
        raise ConfigurationError("exceedance limits need A_JJ = 1")
    if model.p < 1.0 and np.any(model.A_IJ != 0.0):
        raise ConfigurationError("exceedance limits with p < 1 need A_IJ = 0")
    if model.mixing.alpha is None:
        raise ConfigurationError("exceedance limits need a mixing law with a density")


def exceedance_experiment(model: WpMixtureModel, budget: int, rng: RandomStream, *,
                          tail: float = 1e-3, batch: int = 1_000_000) -> ExceedanceSample:
    """Rejection-sample ``X`` given ``X_d > u_n`` and normalize.

    ``u_n`` is the exact ``1 - tail`` quantile of ``X_d``. In the Gumbel
    regime the output is ``(h (X_I - u_n A_IJ), w(u_n)(X_d - u_n))``; in the
    Weibull regime (``x_F = 1``) with ``a_n = 1 - u_n`` it is
    ``((p a_n)^(-1/p) (X_I - A_IJ), (X_d - 1) / a_n)``.
    """
    _check_exceedance_model(model)
    radial = model.radial
    if radial.mda == FRECHET:
        raise ConfigurationError("no joint exceedance limit is implemented for Frechet-domain radii")
    if radial.mda == WEIBULL and radial.upper != 1.0:
        raise ConfigurationError("the Weibull exceedance limit assumes x_F = 1")
    q = model.sphere_J.plus_prob
    if not 0.0 < tail < q:
        raise ConfigurationError(f"tail probability must lie in (0, {q}), got {tail}")
    u = product_quantile(radial, model.mixing, tail / q)
    A_IJ = model.A_IJ[:, 0]
    if radial.mda == GUMBEL:
        w_u = float(radial.scaling(u))
        h = gumbel_scaling_h(u, model.p, radial.scaling)
        shift, scale_J, centre = u * A_IJ, w_u, u
    else:
        a_n = 1.0 - u
        h = (model.p * a_n) ** (-1.0 / model.p)
        shift, scale_J, centre = A_IJ, 1.0 / a_n, 1.0
    I0 = model.partition.I0
    parts_I, parts_J = [], []
    done = 0
    while done < budget:
        size = min(int(batch), int(budget) - done)
        X = sample_mixture(model, size, rng)
        hit = X[:, -1] > u
        parts_I.append(h * (X[hit][:, I0] - shift))
        parts_J.append(scale_J * (X[hit, -1] - centre))
        done += size
    return ExceedanceSample(
        regime=radial.mda,
        part_I=np.concatenate(parts_I),
        part_J=np.concatenate(parts_J),
        level=u,
        scale_I=h,
        scale_J=scale_J,
        proposals=int(budget),
    )


def joint_limit_sample(model: WpMixtureModel, n: int, rng: RandomStream):
    """Draw from the joint exceedance limit matching ``model``'s regime."""
    _check_exceedance_model(model)
    alpha = model.mixing.alpha
    if model.radial.mda == GUMBEL:
        return joint_gumbel_limit_sample(alpha, model.p, model.A_II, model.A_IJ, model.sphere_I, rng, n)
    if model.radial.mda == WEIBULL:
        return joint_weibull_limit_sample(alpha, model.radial.tail_index, model.p, model.A_II,
                                          model.A_IJ, model.sphere_I, rng, n)
    raise ConfigurationError("no joint exceedance limit is implemented for Frechet-domain radii")
