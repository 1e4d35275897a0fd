"""Exact conditional laws of ``X_I`` given ``X_J = a_J``.

Given ``X_J = a_J`` the I-block equals ``A_II R* U_I + A_IJ A_JJ^{-1} a_J``
where the radius ``R*`` has survival function

    P(R* > z) = int_{s(z)}^{x_F} g(tau/r) r^-1 dF(r) / int_tau^{x_F} g(tau/r) r^-1 dF(r)

with ``s(z) = (tau^p + z^p)^(1/p)`` and ``tau = ||a_J||_A``. Integrals run in the
offset variable ``t = r - tau`` so that ``s(z) - tau`` and ``1 - tau/r`` keep
full relative precision for small ``z``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _numeric
from .errors import ConfigurationError, InconclusiveOracleError, NumericalError
from .geometry import a_norm, lq_norm, sample_sphere
from .laws import MixingLaw, RadialLaw
from .mixture import WpMixtureModel, sample_mixture
from .rng import RandomStream

__all__ = [
    "ConditionalLaw",
    "make_conditional",
    "cond_cdf",
    "cond_pdf",
    "cond_quantile",
    "cond_sample",
    "conditional_shift",
    "conditional_radii",
    "SlabResult",
    "slab_conditional_oracle",
    "MIN_SLAB_ACCEPTANCES",
    "MIN_SLAB_BUDGET",
]

MIN_SLAB_ACCEPTANCES = 1000
MIN_SLAB_BUDGET = 100_000
_TABLE_KNOTS = 512
_TABLE_TAIL = 1e-14


class ConditionalLaw:
    """Law ``Q_{F,g,tau}`` of the conditional radius.

    The normalizing integral is computed once at construction.
    """

    def __init__(self, tau: float, radial: RadialLaw, mixing: MixingLaw, p: float):
        tau = float(tau)
        if not (0.0 < tau < radial.upper):
            raise ConfigurationError(f"conditioning level {tau} outside (0, x_F = {radial.upper})")
        if mixing.alpha is None:
            raise ConfigurationError("conditional laws need a mixing law with a density")
        self.tau = tau
        self.radial = radial
        self.mixing = mixing
        self.p = float(p)
        self._start = max(tau, radial.lower)
        self._log_ref = float(radial.logsf(self._start))
        hz = float(radial.hazard(self._start))
        length = 1.0 / hz if hz > 0 and math.isfinite(hz) else max(tau, 1.0)
        if math.isfinite(radial.upper):
            length = min(length, radial.upper - self._start)
        self._length = length
        self._norm_scaled = self._integral(0.0)
        if not (self._norm_scaled > 0 and math.isfinite(self._norm_scaled)):
            raise NumericalError(f"normalizing integral is {self._norm_scaled}")
        self._table = None

    @property
    def norm_const(self) -> float:
        """``int_tau^{x_F} g(tau/r) r^-1 dF(r)``."""
        return self._norm_scaled * math.exp(self._log_ref)

    @property
    def log_norm_const(self) -> float:
        return math.log(self._norm_scaled) + self._log_ref

    @property
    def upper(self) -> float:
        """Upper support point ``(x_F^p - tau^p)^(1/p)``."""
        if not math.isfinite(self.radial.upper):
            return math.inf
        return (self.radial.upper**self.p - self.tau**self.p) ** (1.0 / self.p)

    def offset(self, z):
        """``s(z) - tau`` without cancellation (vectorized)."""
        z = np.asarray(z, dtype=float)
        with np.errstate(divide="ignore"):
            lr = self.p * np.log(z / self.tau)
        out = self.tau * np.expm1(np.logaddexp(0.0, lr) / self.p)
        return float(out) if out.ndim == 0 else out

    def _fun(self, t, gap=None):
        r = self.tau + t
        g = self.mixing.pdf(self.tau / r, t / r)
        lf = self.radial.logpdf(r) if gap is None else self.radial.logpdf_gap(gap)
        with np.errstate(under="ignore"):
            return g / r * np.exp(lf - self._log_ref)

    def _integral(self, t_lo: float, t_hi: float | None = None) -> float:
        """Scaled ``int_{tau + t_lo}^{tau + t_hi} g(tau/r) r^-1 f(r) dr``."""
        top = self.radial.upper - self.tau
        t_hi = top if t_hi is None else min(t_hi, top)
        t_lo = max(t_lo, self._start - self.tau)
        if not t_hi > t_lo:
            return 0.0
        # g(tau/r) behaves like (r - tau)^(alpha - 1) at the lower end
        exponent = self.mixing.alpha - 1.0 if t_lo == 0.0 else 0.0
        upper_exp = self.radial.endpoint_exponent if t_hi == top else 0.0
        return _numeric.quad_split(self._fun, t_lo, t_hi, self._length, singular_exponent=exponent,
                                   upper_exponent=upper_exp)

    def _tails(self, z: np.ndarray):
        """Scaled lower and upper integrals ``(L, U)`` at sorted interior points."""
        t = np.maximum(self.offset(z), self._start - self.tau)
        t = np.maximum.accumulate(np.atleast_1d(t))
        first = self._integral(0.0, float(t[0]))
        last = self._integral(float(t[-1]))
        mids = _numeric.gauss_kronrod_pieces(self._fun, t)
        L = first + np.concatenate([[0.0], np.cumsum(mids)])
        U = last + np.concatenate([np.cumsum(mids[::-1])[::-1], [0.0]])
        return L, U

    def _cdf_sf(self, z):
        z = np.asarray(z, dtype=float)
        flat = z.ravel()
        cdf = np.where(flat >= self.upper, 1.0, 0.0)
        sf = 1.0 - cdf
        inside = np.flatnonzero((flat > 0.0) & (flat < self.upper))
        if inside.size:
            order = inside[np.argsort(flat[inside], kind="stable")]
            L, U = self._tails(flat[order])
            D = self._norm_scaled
            # take whichever side is the smaller integral to avoid cancellation
            cdf[order] = np.clip(np.where(L <= U, L / D, 1.0 - U / D), 0.0, 1.0)
            sf[order] = np.clip(np.where(U <= L, U / D, 1.0 - L / D), 0.0, 1.0)
        return cdf.reshape(z.shape), sf.reshape(z.shape)

    def cdf(self, z):
        """``Q(z)``; accepts scalars or arrays (arrays share one batched quadrature)."""
        out = self._cdf_sf(z)[0]
        return float(out) if out.ndim == 0 else out

    def sf(self, z):
        out = self._cdf_sf(z)[1]
        return float(out) if out.ndim == 0 else out

    def pdf(self, z):
        z = np.asarray(z, dtype=float)
        inside = (z > 0.0) & (z < self.upper)
        zs = np.where(inside, z, 0.5 * min(self.scale_hint(), self.upper))
        t0 = self.offset(zs)
        s = self.tau + t0
        g = self.mixing.pdf(self.tau / s, t0 / s)
        lf = self.radial.logpdf(s)
        with np.errstate(under="ignore", invalid="ignore"):
            val = zs ** (self.p - 1.0) / s**self.p * g * np.exp(lf - self._log_ref) / self._norm_scaled
        out = np.where(inside & np.isfinite(val), val, 0.0)
        return float(out) if out.ndim == 0 else out

    def scale_hint(self) -> float:
        """A z value of the order of the bulk of the law."""
        top = self.radial.upper
        s = self._start + self._length
        if math.isfinite(top):
            s = min(s, 0.5 * (self._start + top))
        return (s**self.p - self.tau**self.p) ** (1.0 / self.p)

    def quantile(self, prob: float) -> float:
        """``z`` with ``cdf(z) = prob`` by bracketed root finding."""
        prob = float(prob)
        if not 0.0 < prob < 1.0:
            raise ConfigurationError(f"probability must lie in (0, 1), got {prob}")
        hi = min(self.scale_hint(), self.upper)

        def fun(z):
            return self.cdf(z) - prob

        if fun(hi) < 0:
            hi = _numeric.expand_bracket(fun, 0.0, hi, upper_limit=self.upper)
        return _numeric.brentq(fun, 0.0, hi, rtol=1e-14)

    def _build_table(self):
        # geometric knots from 1e-9 * top up to the point where the tail is negligible
        top = self.upper
        if not math.isfinite(top):
            top = self.scale_hint()
            while self.sf(top) > _TABLE_TAIL:
                top *= 2.0
        else:
            top = top * (1.0 - 1e-12)
        z = np.geomspace(top * 1e-9, top, _TABLE_KNOTS)
        F = self.cdf(z)
        f = self.pdf(z)
        F = np.maximum.accumulate(F)
        self._table = (z, F, f)
        return self._table

    def sample(self, n: int, rng: RandomStream) -> np.ndarray:
        """Inverse-CDF draws from a cubic Hermite table of the CDF.

        The CDF is tabulated at 512 geometric knots (exact values and
        derivatives), and each uniform is inverted on its cell by safeguarded
        Newton steps. Below the first knot the CDF is continued as a power law.
        """
        z, F, f = self._table or self._build_table()
        u = rng.random(int(n))
        out = np.empty_like(u)
        first = u <= F[0]
        k = z[0] * f[0] / F[0] if F[0] > 0 else 1.0
        out[first] = z[0] * (u[first] / F[0]) ** (1.0 / k) if F[0] > 0 else z[0]
        last = u >= F[-1]
        out[last] = z[-1]
        mid = ~(first | last)
        if np.any(mid):
            um = u[mid]
            i = np.clip(np.searchsorted(F, um, side="right") - 1, 0, len(z) - 2)
            z0, z1 = z[i], z[i + 1]
            F0, F1, f0, f1 = F[i], F[i + 1], f[i], f[i + 1]
            h = z1 - z0

            def H(x):
                s = (x - z0) / h
                h00 = (1 + 2 * s) * (1 - s) ** 2
                h10 = s * (1 - s) ** 2
                h01 = s * s * (3 - 2 * s)
                h11 = s * s * (s - 1)
                return h00 * F0 + h10 * h * f0 + h01 * F1 + h11 * h * f1 - um

            def dH(x):
                s = (x - z0) / h
                d00 = 6 * s * s - 6 * s
                d10 = 3 * s * s - 4 * s + 1
                d01 = -d00
                d11 = 3 * s * s - 2 * s
                return (d00 * F0 + d01 * F1) / h + d10 * f0 + d11 * f1

            dF = np.where(F1 > F0, F1 - F0, 1.0)
            guess = z0 + h * np.clip((um - F0) / dF, 0.0, 1.0)
            out[mid] = _numeric.bisect_newton(H, dH, z0, z1, guess, tol=1e-14, maxiter=100)
        return out


def conditional_shift(model: WpMixtureModel, a_J) -> np.ndarray:
    """``A_IJ A_JJ^{-1} a_J``."""
    return model.A_IJ @ np.linalg.solve(model.A_JJ, np.atleast_1d(np.asarray(a_J, dtype=float)))


def make_conditional(model: WpMixtureModel, a_J) -> ConditionalLaw:
    """Conditional radius law for ``X_J = a_J``."""
    model.check_conditional()
    a_J = np.atleast_1d(np.asarray(a_J, dtype=float))
    if a_J.shape != (model.partition.d - model.partition.m,):
        raise ConfigurationError(f"a_J must have length {model.partition.d - model.partition.m}")
    tau = a_norm(a_J, model.A_JJ, model.norm_J)
    if not (0.0 < tau < model.radial.upper):
        raise ConfigurationError(f"level ||a_J||_A = {tau} outside (0, x_F = {model.radial.upper})")
    if not float(model.radial.cdf(tau)) > 0.0:
        raise ConfigurationError(f"F(||a_J||_A) = 0 at level {tau}; need F in (0, 1)")
    return ConditionalLaw(tau, model.radial, model.mixing, model.p)


def cond_cdf(law: ConditionalLaw, z):
    return law.cdf(z)


def cond_pdf(law: ConditionalLaw, z):
    return law.pdf(z)


def cond_quantile(law: ConditionalLaw, prob):
    if np.ndim(prob) == 0:
        return law.quantile(prob)
    return np.array([law.quantile(v) for v in np.ravel(prob)]).reshape(np.shape(prob))


def cond_sample(model: WpMixtureModel, a_J, n: int, rng: RandomStream, *,
                law: ConditionalLaw | None = None) -> np.ndarray:
    """Draw ``n`` rows of ``X_I`` given ``X_J = a_J``."""
    law = make_conditional(model, a_J) if law is None else law
    radius = law.sample(n, rng)
    U_I = sample_sphere(model.sphere_I, rng, int(n))
    return (radius[:, None] * U_I) @ model.A_II.T + conditional_shift(model, a_J)


def conditional_radii(model: WpMixtureModel, a_J, X_I) -> np.ndarray:
    """Recover ``R*`` as ``||A_II^{-1}(X_I - shift)||_I``."""
    centred = np.atleast_2d(X_I) - conditional_shift(model, a_J)
    return lq_norm(np.linalg.solve(model.A_II, centred.T).T, model.norm_I)


@dataclass
class SlabResult:
    """Accepted I-blocks with their max-coordinate distance to ``a_J``."""

    accepted: np.ndarray
    distance: np.ndarray
    proposals: int
    eps: float

    @property
    def count(self) -> int:
        return len(self.accepted)

    @property
    def rate(self) -> float:
        return self.count / self.proposals

    def shrink(self, eps: float) -> "SlabResult":
        """The acceptances of the narrower slab of half-width ``eps`` (same proposals)."""
        if not 0 < eps <= self.eps:
            raise ConfigurationError(f"eps must lie in (0, {self.eps}], got {eps}")
        keep = self.distance <= eps
        return SlabResult(self.accepted[keep], self.distance[keep], self.proposals, eps)


def slab_conditional_oracle(model: WpMixtureModel, a_J, eps: float, budget: int,
                            rng: RandomStream, *, batch: int = 1_000_000,
                            min_accept: int = MIN_SLAB_ACCEPTANCES) -> SlabResult:
    """Brute-force conditional sampler.

    Simulates ``budget`` full vectors and keeps ``X_I`` whenever every
    coordinate of ``X_J`` lies within ``eps`` of ``a_J``.
    """
    if not eps > 0:
        raise ConfigurationError(f"slab half-width must be positive, got {eps}")
    if budget < MIN_SLAB_BUDGET:
        raise ConfigurationError(f"slab budget must be at least {MIN_SLAB_BUDGET}, got {budget}")
    a_J = np.atleast_1d(np.asarray(a_J, dtype=float))
    I0, J0 = model.partition.I0, model.partition.J0
    kept, dist = [], []
    done = 0
    while done < budget:
        size = min(batch, budget - done)
        X = sample_mixture(model, size, rng)
        gap = np.max(np.abs(X[:, J0] - a_J), axis=1)
        hit = gap <= eps
        kept.append(X[hit][:, I0])
        dist.append(gap[hit])
        done += size
    accepted = np.concatenate(kept)
    distance = np.concatenate(dist)
    if len(accepted) < min_accept:
        raise InconclusiveOracleError(
            f"slab oracle accepted {len(accepted)} of {budget} proposals (need {min_accept}); "
            "raise the budget or widen eps"
        )
    return SlabResult(accepted=accepted, distance=distance, proposals=budget, eps=eps)
