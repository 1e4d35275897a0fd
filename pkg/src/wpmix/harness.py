"""Goodness-of-fit tools, convergence sweeps and tail-integral ratio checks."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import _numeric
from .conditional import ConditionalLaw
from .errors import ConfigurationError
from .laws import FRECHET, GUMBEL, WEIBULL, MixingLaw, RadialLaw
from .limits import LimitLaw, NormalizingSequence

__all__ = [
    "GofReport",
    "ecdf",
    "ks_distance",
    "ks_two_sample",
    "sup_gap",
    "kolmogorov_threshold",
    "lemma1a_ratio",
    "lemma1b_ratio",
    "lemma1c_checks",
    "SweepRow",
    "convergence_sweep",
]


@dataclass(frozen=True)
class GofReport:
    statistic: str
    value: float
    size: int
    threshold: float

    def __post_init__(self):
        if not self.value >= 0:
            raise ConfigurationError(f"statistic must be non-negative, got {self.value}")

    @property
    def passed(self) -> bool:
        return self.value <= self.threshold


def _sorted_sample(samples) -> np.ndarray:
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ConfigurationError("empty sample")
    return x


def ecdf(samples):
    """Right-continuous empirical distribution function of ``samples``."""
    x = _sorted_sample(samples)
    n = x.size

    def F(t):
        out = np.searchsorted(x, np.asarray(t, dtype=float), side="right") / n
        return float(out) if np.ndim(out) == 0 else out

    return F


def ks_distance(samples, cdf) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a vectorized ``cdf``."""
    x = _sorted_sample(samples)
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(0, n) / n
    return float(max(upper.max(), lower.max(), 0.0))


def ks_two_sample(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    x, y = _sorted_sample(a), _sorted_sample(b)
    pooled = np.concatenate([x, y])
    Fx = np.searchsorted(x, pooled, side="right") / x.size
    Fy = np.searchsorted(y, pooled, side="right") / y.size
    return float(np.max(np.abs(Fx - Fy)))


def sup_gap(cdf_a, cdf_b, grid) -> float:
    grid = np.asarray(grid, dtype=float)
    return float(np.max(np.abs(np.asarray(cdf_a(grid)) - np.asarray(cdf_b(grid)))))


def kolmogorov_threshold(n: int, m: int | None = None, level: float = 0.01) -> float:
    """Critical KS distance at significance ``level`` (asymptotic Kolmogorov law)."""
    size = n if m is None else n * m / (n + m)
    return float(special.kolmogi(level) / math.sqrt(size))


def _scaled_integral(fun, a: float, b: float, length: float, lower_exp: float = 0.0,
                     upper_exp: float = 0.0) -> float:
    return _numeric.quad_split(fun, a, b, length, singular_exponent=lower_exp, upper_exponent=upper_exp)


def lemma1a_ratio(law: RadialLaw, mixing: MixingLaw, y: float, z: float, u: float) -> float:
    """Ratio of ``int_{uz}^inf g(uy/r) r^-1 dF(r)`` to its power-law approximation.

    The approximation is ``(gamma/u) F_bar(u) int_z^inf g(y/r) r^(-gamma-2) dr``
    for a Frechet-domain ``F`` with index ``gamma``.
    """
    if law.mda != FRECHET:
        raise ConfigurationError("this ratio needs a Frechet-domain radial law")
    if not (y > 0 and z > 0 and u > 0):
        raise ConfigurationError("y, z and u must be positive")
    gamma = law.tail_index
    alpha = mixing.alpha
    # g(uy/r) vanishes for r < uy, so both integrals start at the larger bound
    start = max(u * z, u * y, law.lower)
    ref = float(law.logsf(start))
    sing = alpha - 1.0 if start == u * y else 0.0

    def lhs_fun(r):
        with np.errstate(under="ignore"):
            return mixing.pdf(u * y / r, (r - u * y) / r) / r * np.exp(law.logpdf(r) - ref)

    lhs = _scaled_integral(lhs_fun, start, math.inf, start, sing)
    start_r = max(z, y)
    sing_r = alpha - 1.0 if start_r == y else 0.0

    def rhs_fun(r):
        return mixing.pdf(y / r, (r - y) / r) * (r / start_r) ** (-gamma - 2.0)

    rhs = _scaled_integral(rhs_fun, start_r, math.inf, start_r, sing_r) * start_r ** (-gamma - 2.0)
    log_rhs = math.log(gamma / u) + float(law.logsf(u)) + math.log(rhs)
    return math.exp(math.log(lhs) + ref - log_rhs)


def lemma1b_ratio(law: RadialLaw, mixing: MixingLaw, y: float, z: float, beta: float, u: float) -> float:
    """Ratio of ``int_{1-u(z-y)}^1 g((1-uz)/x) x^beta dF(x)`` to its endpoint approximation.

    The approximation is ``gamma F_bar(1-u) g(1-u) int_0^{z-y} (z-t)^(alpha-1) t^(gamma-1) dt``
    for ``F`` with a power tail of index ``gamma`` at ``x_F = 1``.
    """
    if law.mda != WEIBULL or law.upper != 1.0:
        raise ConfigurationError("this ratio needs a Weibull-domain radial law with x_F = 1")
    if not (0.0 <= y < z and u > 0 and u * z < 1.0):
        raise ConfigurationError("need 0 <= y < z and 0 < u z < 1")
    gamma, alpha = law.tail_index, mixing.alpha
    width = u * (z - y)

    # integrate in s = 1 - x; the mixing complement is (uz - s)/(1 - s)
    def fun(s, gap=None):
        rest = (u * z - s) if gap is None else (gap + u * y)
        w = (1.0 - u * z) / (1.0 - s)
        g = mixing.pdf(w, rest / (1.0 - s))
        return g * (1.0 - s) ** beta * np.exp(law.logpdf_gap(s))

    upper_exp = alpha - 1.0 if y == 0.0 else 0.0
    lhs = _numeric.quad(fun, 0.0, width, singular_exponent=gamma - 1.0, upper_exponent=upper_exp)
    # int_0^{z-y} (z-t)^(alpha-1) t^(gamma-1) dt via the incomplete beta function
    tail = z ** (alpha + gamma - 1.0) * math.exp(special.betaln(gamma, alpha)) * special.betainc(
        gamma, alpha, (z - y) / z)
    rhs = gamma * float(law.sf(1.0 - u)) * float(mixing.pdf(1.0 - u, u)) * tail
    return lhs / rhs


def lemma1c_checks(law: RadialLaw, mixing: MixingLaw, beta: float, mu: float, z: float,
                   u: float) -> tuple[float, float]:
    """Return ``(vanish, ratio)`` for a Gumbel-domain ``F`` at level ``u``.

    ``vanish = (u w(u))^beta F_bar(mu u) / F_bar(u)`` and ``ratio`` compares
    ``int_{u+z/w(u)}^{x_F} g(u/x) x^beta dF(x)`` with
    ``F_bar(u) g(1 - 1/(u w(u))) u^beta Gamma(alpha, z)``.
    """
    if law.mda != GUMBEL:
        raise ConfigurationError("this check needs a Gumbel-domain radial law")
    if not mu > 1.0:
        raise ConfigurationError(f"mu must exceed 1, got {mu}")
    if not 0.0 < u < law.upper:
        raise ConfigurationError(f"u must lie in (0, x_F), got {u}")
    if z < 0:
        raise ConfigurationError(f"z must be non-negative, got {z}")
    w_u = float(law.scaling(u))
    vw = u * w_u
    log_vanish = beta * math.log(vw) + float(law.logsf(mu * u)) - float(law.logsf(u))
    vanish = math.exp(log_vanish)
    alpha = mixing.alpha
    start = max(u + z / w_u, law.lower)
    ref = float(law.logsf(start))

    def fun(x, gap=None):
        lf = law.logpdf(x) if gap is None else law.logpdf_gap(gap)
        with np.errstate(under="ignore"):
            return mixing.pdf(u / x, (x - u) / x) * (x / u) ** beta * np.exp(lf - ref)

    length = 1.0 / float(law.hazard(start))
    if math.isfinite(law.upper):
        length = min(length, law.upper - start)
    sing = alpha - 1.0 if z == 0.0 else 0.0
    lhs = _numeric.quad_split(fun, start, law.upper, length, singular_exponent=sing,
                              upper_exponent=law.endpoint_exponent)
    gamma_tail = math.exp(special.gammaln(alpha)) * float(special.gammaincc(alpha, z))
    g_val = float(mixing.pdf(1.0 - 1.0 / vw, 1.0 / vw))
    log_ratio = math.log(lhs) + ref - (float(law.logsf(u)) + math.log(g_val * gamma_tail))
    return vanish, math.exp(log_ratio)


@dataclass(frozen=True)
class SweepRow:
    level: float
    tau: float
    scale: float
    sup_gap: float


def convergence_sweep(model, levels, limit: LimitLaw, rescale: NormalizingSequence, *,
                      grid_size: int = 200) -> list[SweepRow]:
    """Sup-gap between the rescaled conditional CDF and the limit CDF per level.

    ``model`` supplies ``radial``, ``mixing`` and ``p``. The grid is the set
    of limit quantiles at ``grid_size`` evenly spaced interior probabilities,
    so every regime is probed where the limit law has its mass.
    """
    probs = (np.arange(grid_size) + 0.5) / grid_size
    z = np.asarray(limit.quantile(probs), dtype=float)
    ref = np.asarray(limit.cdf(z), dtype=float)
    rows = []
    for x in levels:
        tau = rescale.level(x)
        h = rescale.scale(x)
        law = ConditionalLaw(tau, model.radial, model.mixing, model.p)
        vals = np.asarray(law.cdf(z / h), dtype=float)
        rows.append(SweepRow(float(x), tau, h, float(np.max(np.abs(vals - ref)))))
    return rows
