"""Radial laws F of R and mixing laws g of W_p.

Radial laws are specified through their log-survival function so that tail
probabilities far below machine epsilon stay representable; every conditional
integral downstream is formed from ratios of such tails.

The tail formulas of the Kotz type III and finite-endpoint families only pin
down the upper tail. Below the point ``u0`` where the formula reaches one the
law puts no mass, so ``F`` is exact rather than asymptotic. When the formula
stays below one on the whole positive half-line its constant is rescaled so
that the survival function equals one at zero; the tail shape, and therefore
the scaling function, is unchanged.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special

from ._numeric import bisect_newton, brentq
from .errors import ConfigurationError
from .rng import RandomStream

__all__ = [
    "RadialLaw",
    "MixingLaw",
    "Kotz3Radial",
    "FiniteEndpointRadial",
    "ParetoRadial",
    "PowerEndpointRadial",
    "BetaMixing",
    "PowerBetaMixing",
    "PointMassMixing",
    "kotz3_radial",
    "exponential_radial",
    "finite_endpoint_radial",
    "pareto_radial",
    "power_endpoint_radial",
    "hazard_scaling",
    "beta_mixing",
    "uniform_mixing",
    "power_beta_mixing",
    "spherical_mixing",
    "point_mass_mixing",
    "GUMBEL",
    "WEIBULL",
    "FRECHET",
]

GUMBEL = "gumbel"
WEIBULL = "weibull"
FRECHET = "frechet"


def _positive(**params):
    for name, value in params.items():
        if not (value > 0 and math.isfinite(value)):
            raise ConfigurationError(f"parameter {name} must be positive and finite, got {value}")


class RadialLaw:
    """Distribution of the positive radius R.

    Subclasses implement :meth:`logsf`, :meth:`logpdf` and :meth:`_isf_log`
    (the inverse of ``logsf``). Everything else is derived.

    Attributes:
        lower: left end of the support.
        upper: upper endpoint ``x_F`` (may be ``inf``).
        mda: one of ``"gumbel"``, ``"weibull"``, ``"frechet"``.
        tail_index: ``gamma`` for Weibull and Frechet laws, ``None`` otherwise.
    """

    lower: float = 0.0
    upper: float = math.inf
    mda: str = GUMBEL
    tail_index: float | None = None
    family: str = "custom"
    # f(x) ~ (x_F - x)^endpoint_exponent near a finite x_F
    endpoint_exponent: float = 0.0

    def logsf(self, x):
        raise NotImplementedError

    def logpdf(self, x):
        raise NotImplementedError

    def _isf_log(self, log_level):
        raise NotImplementedError

    def logpdf_gap(self, gap):
        """``log f(x_F - gap)`` for a finite endpoint, accurate for tiny gaps."""
        return self.logpdf(self.upper - np.asarray(gap, dtype=float))

    def params(self) -> dict:
        return {}

    def sf(self, x):
        return np.exp(self.logsf(x))

    def cdf(self, x):
        return -np.expm1(self.logsf(x))

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def isf(self, v):
        """Inverse survival function."""
        with np.errstate(divide="ignore"):
            return self._isf_log(np.log(np.asarray(v, dtype=float)))

    def ppf(self, prob):
        """Quantile function ``F^{-1}``."""
        with np.errstate(divide="ignore"):
            return self._isf_log(np.log1p(-np.asarray(prob, dtype=float)))

    def hazard(self, x):
        return np.exp(self.logpdf(x) - self.logsf(x))

    def scaling(self, u):
        """Scaling function ``w`` of the Gumbel domain (hazard rate by default)."""
        return hazard_scaling(self)(u)

    def sample(self, n: int, rng: RandomStream) -> np.ndarray:
        # 1 - U lies in (0, 1], so isf never sees zero
        return self.isf(1.0 - rng.random(int(n)))

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


def hazard_scaling(law: RadialLaw):
    """Return ``w(u) = f(u) / (1 - F(u))`` for a Gumbel-domain law."""
    if law.mda != GUMBEL:
        raise ConfigurationError("hazard scaling is defined for Gumbel-domain laws only")

    def w(u):
        u_arr = np.asarray(u, dtype=float)
        if np.any(u_arr >= law.upper):
            raise ConfigurationError(f"scaling function evaluated at or beyond x_F = {law.upper}")
        out = np.exp(law.logpdf(u_arr) - law.logsf(u_arr))
        return float(out) if out.ndim == 0 else out

    return w


class Kotz3Radial(RadialLaw):
    """Survival ``K u^N exp(-r u^delta)`` above the point where it equals one."""

    family = "kotz3"

    def __init__(self, K: float, N: float, r: float, delta: float):
        _positive(K=K, r=r, delta=delta)
        self.K, self.N, self.r, self.delta = float(K), float(N), float(r), float(delta)
        logK = math.log(self.K)
        N, r, d = self.N, self.r, self.delta

        def formula(u):
            return logK + (N * math.log(u) if N else 0.0) - r * u**d

        if N == 0.0:
            if logK > 0:
                self.lower, self.log_const = (logK / r) ** (1.0 / d), logK
            else:
                self.lower, self.log_const = 0.0, 0.0
        elif N < 0.0:
            hi = 1.0
            while formula(hi) > 0:
                hi *= 2.0
            lo = hi / 2.0
            while formula(lo) < 0:
                lo /= 2.0
            self.lower, self.log_const = brentq(formula, lo, hi), logK
        else:
            peak = (N / (r * d)) ** (1.0 / d)
            if formula(peak) < 0:
                raise ConfigurationError(
                    "Kotz III tail never reaches one, so it cannot be a survival function "
                    f"(K={K}, N={N}, r={r}, delta={delta})"
                )
            hi = 2.0 * peak
            while formula(hi) > 0:
                hi *= 2.0
            self.lower = peak if formula(peak) == 0 else brentq(formula, peak, hi)
            self.log_const = logK

    def params(self):
        return {"K": self.K, "N": self.N, "r": self.r, "delta": self.delta}

    def _raw_logsf(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            powN = self.N * np.log(x) if self.N else 0.0
            return self.log_const + powN - self.r * x**self.delta

    def logsf(self, x):
        x = np.asarray(x, dtype=float)
        inside = x > self.lower
        xs = np.where(inside, x, max(self.lower, 1.0))
        out = np.where(inside, self._raw_logsf(xs), 0.0)
        return float(out) if out.ndim == 0 else out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = x > self.lower
        xs = np.where(inside, x, max(self.lower, 1.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            h = self.r * self.delta * xs ** (self.delta - 1.0) - self.N / xs
            out = np.where(inside, self._raw_logsf(xs) + np.log(h), -np.inf)
        return float(out) if out.ndim == 0 else out

    def scaling(self, u):
        u = np.asarray(u, dtype=float)
        out = self.r * self.delta * u ** (self.delta - 1.0)
        return float(out) if out.ndim == 0 else out

    def _isf_log(self, log_level):
        L = np.asarray(log_level, dtype=float)
        scalar = L.ndim == 0
        L = np.atleast_1d(L)
        with np.errstate(invalid="ignore"):
            gap = np.maximum(self.log_const - L, 0.0)
        if self.N == 0.0:
            out = np.maximum((gap / self.r) ** (1.0 / self.delta), self.lower)
        else:
            finite = np.isfinite(L)
            Lf = np.where(finite, L, 0.0)
            guess = np.maximum((gap / self.r) ** (1.0 / self.delta), self.lower)
            guess = np.where(finite, guess, self.lower + 1.0)
            lo = np.full_like(Lf, self.lower)
            hi = np.maximum(2.0 * guess, self.lower + 1.0)
            for _ in range(200):
                short = self._raw_logsf(hi) > Lf
                if not np.any(short):
                    break
                hi = np.where(short, 2.0 * hi, hi)

            def fun(u):
                return Lf - self._raw_logsf(u)

            def dfun(u):
                return self.r * self.delta * u ** (self.delta - 1.0) - self.N / u

            out = bisect_newton(fun, dfun, lo, hi, np.clip(guess, lo, hi))
            out = np.where(L >= 0, self.lower, out)
            out = np.where(np.isneginf(L), np.inf, out)
        out = np.where(np.isneginf(L), np.inf, out)
        return float(out[0]) if scalar else out


class FiniteEndpointRadial(RadialLaw):
    """Survival ``c1 exp(-c2 (x_F - u)^(-lambda))`` below the endpoint ``x_F``."""

    family = "finite_endpoint"

    def __init__(self, c1: float, c2: float, lam: float, x_F: float):
        _positive(c1=c1, c2=c2, lam=lam, x_F=x_F)
        self.c1, self.c2, self.lam, self.upper = float(c1), float(c2), float(lam), float(x_F)
        u0 = -math.inf
        if self.c1 > 1.0:
            u0 = self.upper - (math.log(self.c1) / self.c2) ** (-1.0 / self.lam)
        if u0 >= 0.0:
            self.lower, self.log_const = u0, math.log(self.c1)
        else:
            self.lower, self.log_const = 0.0, self.c2 * self.upper ** (-self.lam)

    def params(self):
        return {"c1": self.c1, "c2": self.c2, "lam": self.lam, "x_F": self.upper}

    def _split(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.lower) & (x < self.upper)
        gap = np.where(inside, self.upper - x, 1.0)
        return x, inside, gap

    def logsf(self, x):
        x, inside, gap = self._split(x)
        raw = self.log_const - self.c2 * gap ** (-self.lam)
        out = np.where(inside, raw, np.where(x <= self.lower, 0.0, -np.inf))
        return float(out) if out.ndim == 0 else out

    def logpdf(self, x):
        x, inside, gap = self._split(x)
        raw = (self.log_const - self.c2 * gap ** (-self.lam)
               + math.log(self.c2 * self.lam) - (self.lam + 1.0) * np.log(gap))
        out = np.where(inside, raw, -np.inf)
        return float(out) if out.ndim == 0 else out

    def scaling(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u >= self.upper):
            raise ConfigurationError(f"scaling function evaluated at or beyond x_F = {self.upper}")
        out = self.c2 * self.lam * (self.upper - u) ** (-self.lam - 1.0)
        return float(out) if out.ndim == 0 else out

    def _isf_log(self, log_level):
        L = np.asarray(log_level, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            gap = np.maximum(self.log_const - L, 0.0)
            out = self.upper - (gap / self.c2) ** (-1.0 / self.lam)
        out = np.where(np.isneginf(L), self.upper, np.maximum(out, self.lower))
        return float(out) if out.ndim == 0 else out


class ParetoRadial(RadialLaw):
    """Exact Pareto law with survival ``lambda x^(-gamma)``."""

    family = "pareto"
    mda = FRECHET

    def __init__(self, lam: float, gamma: float):
        _positive(lam=lam, gamma=gamma)
        self.lam, self.tail_index = float(lam), float(gamma)
        self.lower = self.lam ** (1.0 / self.tail_index)

    def params(self):
        return {"lam": self.lam, "gamma": self.tail_index}

    def logsf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(x > self.lower, math.log(self.lam) - self.tail_index * np.log(np.maximum(x, self.lower)), 0.0)
        return float(out) if out.ndim == 0 else out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        g = self.tail_index
        with np.errstate(divide="ignore"):
            out = np.where(x > self.lower,
                           math.log(g * self.lam) - (g + 1.0) * np.log(np.maximum(x, self.lower)),
                           -np.inf)
        return float(out) if out.ndim == 0 else out

    def _isf_log(self, log_level):
        L = np.asarray(log_level, dtype=float)
        out = np.exp((math.log(self.lam) - np.minimum(L, 0.0)) / self.tail_index)
        out = np.maximum(out, self.lower)
        return float(out) if out.ndim == 0 else out


class PowerEndpointRadial(RadialLaw):
    """``F(x) = 1 - (1 - x)^gamma`` on ``[0, 1]``."""

    family = "power_endpoint"
    mda = WEIBULL
    upper = 1.0

    def __init__(self, gamma: float):
        _positive(gamma=gamma)
        self.tail_index = float(gamma)
        self.endpoint_exponent = self.tail_index - 1.0

    def params(self):
        return {"gamma": self.tail_index}

    def logsf(self, x):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, 0.0, 1.0)
        with np.errstate(divide="ignore"):
            out = np.where(x <= 0, 0.0, np.where(x >= 1, -np.inf, self.tail_index * np.log1p(-xc)))
        return float(out) if out.ndim == 0 else out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        g = self.tail_index
        xc = np.clip(x, 0.0, 0.5)
        xc = np.where((x > 0) & (x < 1), x, xc)
        with np.errstate(divide="ignore"):
            out = np.where((x > 0) & (x < 1), math.log(g) + (g - 1.0) * np.log1p(-xc), -np.inf)
        return float(out) if out.ndim == 0 else out

    def logpdf_gap(self, gap):
        gap = np.asarray(gap, dtype=float)
        inside = (gap > 0) & (gap < 1)
        with np.errstate(divide="ignore"):
            out = np.where(inside, math.log(self.tail_index)
                           + (self.tail_index - 1.0) * np.log(np.where(inside, gap, 0.5)), -np.inf)
        return float(out) if out.ndim == 0 else out

    def _isf_log(self, log_level):
        L = np.minimum(np.asarray(log_level, dtype=float), 0.0)
        out = -np.expm1(L / self.tail_index)
        return float(out) if out.ndim == 0 else out


def kotz3_radial(K: float, N: float, r: float, delta: float) -> Kotz3Radial:
    """Kotz type III radial law; Gumbel domain with ``w(s) = r delta s^(delta-1)``."""
    return Kotz3Radial(K, N, r, delta)


def exponential_radial() -> Kotz3Radial:
    """Unit exponential law, the Kotz III law with ``K=1, N=0, r=1, delta=1``."""
    return Kotz3Radial(1.0, 0.0, 1.0, 1.0)


def finite_endpoint_radial(c1: float, c2: float, lam: float, x_F: float) -> FiniteEndpointRadial:
    """Gumbel-domain law with finite endpoint, ``w(s) = c2 lam (x_F - s)^(-lam-1)``."""
    return FiniteEndpointRadial(c1, c2, lam, x_F)


def pareto_radial(lam: float, gamma: float) -> ParetoRadial:
    return ParetoRadial(lam, gamma)


def power_endpoint_radial(gamma: float) -> PowerEndpointRadial:
    return PowerEndpointRadial(gamma)


class MixingLaw:
    """Law of the splitting variable ``W_p`` on ``[0, 1]``.

    Densities accept an optional complement ``wc = 1 - w`` so that callers who
    know ``1 - w`` more accurately than ``w`` itself (near ``w = 1``) can pass it.

    Attributes:
        alpha: regular-variation parameter at 1; ``g(1 - x/u)/g(1 - 1/u) -> x^(alpha-1)``.
    """

    alpha: float | None = None
    family: str = "custom"

    def pdf(self, w, wc=None):
        raise NotImplementedError

    def cdf(self, w):
        raise NotImplementedError

    def sf(self, w, wc=None):
        return 1.0 - self.cdf(w)

    def sample(self, n: int, rng: RandomStream) -> np.ndarray:
        raise NotImplementedError

    def envelope(self, eps: float) -> tuple[float, float]:
        """Constants ``(c, gamma)`` with ``g(x) <= c x^gamma`` on ``(0, eps)``."""
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


class BetaMixing(MixingLaw):
    """``W_p ~ Beta(a, alpha)``."""

    family = "beta"

    def __init__(self, a: float, alpha: float):
        _positive(a=a, alpha=alpha)
        self.a, self.alpha = float(a), float(alpha)
        self._logB = special.betaln(self.a, self.alpha)

    def params(self):
        return {"a": self.a, "alpha": self.alpha}

    def pdf(self, w, wc=None):
        w = np.asarray(w, dtype=float)
        wc = 1.0 - w if wc is None else np.asarray(wc, dtype=float)
        inside = (w > 0) & (wc > 0)
        ws, wcs = np.where(inside, w, 0.5), np.where(inside, wc, 0.5)
        val = np.exp((self.a - 1.0) * np.log(ws) + (self.alpha - 1.0) * np.log(wcs) - self._logB)
        return _out(np.where(inside, val, 0.0))

    def cdf(self, w):
        return _out(special.betainc(self.a, self.alpha, np.clip(w, 0.0, 1.0)))

    def sf(self, w, wc=None):
        w = np.asarray(w, dtype=float)
        wc = 1.0 - w if wc is None else np.asarray(wc, dtype=float)
        return _out(special.betainc(self.alpha, self.a, np.clip(wc, 0.0, 1.0)))

    def sample(self, n, rng):
        return rng.beta(self.a, self.alpha, size=int(n))

    def envelope(self, eps):
        c = max(1.0, (1.0 - eps) ** (self.alpha - 1.0)) * math.exp(-self._logB)
        return c, self.a - 1.0


class PowerBetaMixing(MixingLaw):
    """``W_p^delta ~ Beta(a, b)``; regular variation at 1 with ``alpha = b``."""

    family = "power_beta"

    def __init__(self, delta: float, a: float, b: float):
        _positive(delta=delta, a=a, b=b)
        self.delta, self.a, self.b = float(delta), float(a), float(b)
        self.alpha = self.b
        self._logB = special.betaln(self.a, self.b)

    def params(self):
        return {"delta": self.delta, "a": self.a, "b": self.b}

    def _one_minus_pow(self, w, wc):
        # 1 - w^delta, accurate when w is close to one
        with np.errstate(divide="ignore"):
            return -np.expm1(self.delta * np.log1p(-wc))

    def pdf(self, w, wc=None):
        w = np.asarray(w, dtype=float)
        wc = 1.0 - w if wc is None else np.asarray(wc, dtype=float)
        inside = (w > 0) & (wc > 0)
        ws, wcs = np.where(inside, w, 0.5), np.where(inside, wc, 0.5)
        om = self._one_minus_pow(ws, wcs)
        val = np.exp(math.log(self.delta) + (self.delta * self.a - 1.0) * np.log(ws)
                     + (self.b - 1.0) * np.log(om) - self._logB)
        return _out(np.where(inside, val, 0.0))

    def cdf(self, w):
        w = np.clip(np.asarray(w, dtype=float), 0.0, 1.0)
        return _out(special.betainc(self.a, self.b, w**self.delta))

    def sf(self, w, wc=None):
        w = np.clip(np.asarray(w, dtype=float), 0.0, 1.0)
        wc = 1.0 - w if wc is None else np.asarray(wc, dtype=float)
        om = np.clip(self._one_minus_pow(w, np.clip(wc, 0.0, 1.0)), 0.0, 1.0)
        return _out(special.betainc(self.b, self.a, om))

    def sample(self, n, rng):
        return rng.beta(self.a, self.b, size=int(n)) ** (1.0 / self.delta)

    def envelope(self, eps):
        c = self.delta * max(1.0, (1.0 - eps**self.delta) ** (self.b - 1.0)) * math.exp(-self._logB)
        return c, self.delta * self.a - 1.0


class PointMassMixing(MixingLaw):
    """Degenerate ``W_p`` equal to a constant; usable for sampling only."""

    family = "point_mass"

    def __init__(self, at: float = 1.0):
        if not 0.0 <= at <= 1.0:
            raise ConfigurationError(f"point mass must lie in [0, 1], got {at}")
        self.at = float(at)

    def params(self):
        return {"at": self.at}

    def pdf(self, w, wc=None):
        raise ConfigurationError("a point-mass mixing law has no density")

    def cdf(self, w):
        return _out(np.where(np.asarray(w, dtype=float) >= self.at, 1.0, 0.0))

    def sample(self, n, rng):
        return np.full(int(n), self.at)


def beta_mixing(a: float, alpha: float) -> BetaMixing:
    return BetaMixing(a, alpha)


def uniform_mixing() -> BetaMixing:
    return BetaMixing(1.0, 1.0)


def power_beta_mixing(delta: float, a: float, b: float) -> PowerBetaMixing:
    return PowerBetaMixing(delta, a, b)


def spherical_mixing(d: int, m: int) -> PowerBetaMixing:
    """Mixing law making the L_2 model spherical in ``R^d`` with ``|I| = m``.

    ``W^2 ~ Beta(m/2, (d-m)/2)`` for the I-block factor, hence
    ``W_p^2 ~ Beta((d-m)/2, m/2)`` and ``alpha = m/2``.
    """
    if not 1 <= m < d:
        raise ConfigurationError(f"need 1 <= m < d, got m={m}, d={d}")
    return PowerBetaMixing(2.0, (d - m) / 2.0, m / 2.0)


def point_mass_mixing(at: float = 1.0) -> PointMassMixing:
    return PointMassMixing(at)
