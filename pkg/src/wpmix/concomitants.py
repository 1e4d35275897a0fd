"""Concomitants of the top X order statistics in the bivariate model.

For a sample of pairs ``(X_j, Y_j)`` the concomitant ``Y_[i:n]`` is the Y
partner of the i-th smallest X. Normalized by ``A_n`` and ``B_n`` the top-k
concomitants become asymptotically independent with symmetric limits whose
p-th absolute power is ``Gamma(alpha, rate 1/p)``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConfigurationError
from .harness import ks_distance
from .laws import GUMBEL
from .mixture import BivariateModel, marginal_quantile_X, sample_bivariate
from .rng import substream

__all__ = [
    "ConcomitantExperiment",
    "NormalizationConstants",
    "ConcomitantReport",
    "concomitant_extract",
    "top_order_statistics",
    "normalizing_constants",
    "eta_limit_cdf",
    "orderstat_limit_cdf",
    "run_concomitant_experiment",
    "thread_count",
]

STREAM_TAG = "concomitants"


@dataclass(frozen=True)
class ConcomitantExperiment:
    model: BivariateModel
    n: int
    k: int
    reps: int
    seed: int

    def __post_init__(self):
        if not 1 <= self.k < self.n:
            raise ConfigurationError(f"need 1 <= k < n, got k={self.k}, n={self.n}")
        if self.reps < 1:
            raise ConfigurationError(f"reps must be positive, got {self.reps}")
        if self.model.p <= 1.0 and self.model.rho != 0.0:
            raise ConfigurationError("for p <= 1 the concomitant limit needs rho = 0")
        if self.model.radial.mda != GUMBEL:
            raise ConfigurationError("the concomitant limit needs a Gumbel-domain radial law")


@dataclass(frozen=True)
class NormalizationConstants:
    b_n: float
    a_n: float
    A_n: float
    B_n: float


def _top_indices(x: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest entries, largest first; among equal values the
    later index ranks higher."""
    n = x.size
    if not 1 <= k < n:
        raise ConfigurationError(f"need 1 <= k < n, got k={k}, n={n}")
    cand = np.argpartition(x, n - k)[n - k:]
    cutoff = x[cand].min()
    if np.count_nonzero(x == cutoff) != np.count_nonzero(x[cand] == cutoff):
        # a tie straddles the cut; fall back to a full stable sort
        return np.argsort(x, kind="stable")[::-1][:k]
    order = np.lexsort((cand, x[cand]))
    return cand[order][::-1]


def concomitant_extract(pairs, k: int) -> np.ndarray:
    """``(Y_[n:n], ..., Y_[n-k+1:n])`` from an ``(n, 2)`` array of pairs."""
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ConfigurationError("pairs must be an (n, 2) array")
    idx = _top_indices(pairs[:, 0], int(k))
    return pairs[idx, 1]


def top_order_statistics(pairs, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Top-k X values (descending) and their concomitants."""
    pairs = np.asarray(pairs, dtype=float)
    idx = _top_indices(pairs[:, 0], int(k))
    return pairs[idx, 0], pairs[idx, 1]


def normalizing_constants(model: BivariateModel, n: int) -> NormalizationConstants:
    """``b_n = H^{-1}(1 - 1/n)``, ``a_n = 1/w(b_n)`` and the concomitant scales.

    ``A_n = (1 - |rho|^p)^(1/p) b_n / (b_n w(b_n))^(1/p)`` and ``B_n = rho b_n``.
    """
    if n < 2:
        raise ConfigurationError(f"n must be at least 2, got {n}")
    if model.radial.mda != GUMBEL:
        raise ConfigurationError("normalizing constants need a Gumbel-domain radial law")
    b = marginal_quantile_X(model, 1.0 - 1.0 / n)
    w = float(model.radial.scaling(b))
    A = model.orth_scale * b / (b * w) ** (1.0 / model.p)
    return NormalizationConstants(b_n=b, a_n=1.0 / w, A_n=A, B_n=model.rho * b)


def _gamma_part(alpha: float, p: float, x):
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    return special.gammainc(alpha, x**p / p)


def eta_limit_cdf(alpha: float, p: float, q2: float, x):
    """CDF of ``I_2 R_alpha`` with ``P(I_2 = 1) = q2`` and ``R_alpha^p ~ Gamma(alpha, rate 1/p)``."""
    if not (alpha > 0 and p > 0):
        raise ConfigurationError("alpha and p must be positive")
    if not 0.0 < q2 <= 1.0:
        raise ConfigurationError(f"q2 must lie in (0, 1], got {q2}")
    x = np.asarray(x, dtype=float)
    out = (1.0 - q2) + q2 * _gamma_part(alpha, p, x) - (1.0 - q2) * _gamma_part(alpha, p, -x)
    return float(out) if out.ndim == 0 else out


def orderstat_limit_cdf(i: int, x):
    """Limit CDF of the i-th largest normalized maximum in the Gumbel domain.

    ``Lambda(x) sum_{j<i} (-log Lambda(x))^j / j!``, which equals the
    regularized upper incomplete gamma function ``Q(i, e^-x)``.
    """
    if i < 1:
        raise ConfigurationError(f"rank must be at least 1, got {i}")
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        out = special.gammaincc(i, np.exp(-x))
    return float(out) if out.ndim == 0 else out


@dataclass
class ConcomitantReport:
    """Normalized concomitants ``eta`` and order statistics ``xi`` per replication."""

    experiment: ConcomitantExperiment
    constants: NormalizationConstants
    eta: np.ndarray
    xi: np.ndarray

    @property
    def alpha(self) -> float:
        return self.experiment.model.mixing.alpha

    def eta_cdf(self, x):
        m = self.experiment.model
        return eta_limit_cdf(self.alpha, m.p, m.q2, x)

    @property
    def maxima(self) -> np.ndarray:
        return self.eta.max(axis=1)

    def marginal_ks(self) -> list[float]:
        return [ks_distance(self.eta[:, i], self.eta_cdf) for i in range(self.eta.shape[1])]

    def correlation(self) -> np.ndarray:
        if self.eta.shape[1] == 1:
            return np.ones((1, 1))
        return np.corrcoef(self.eta, rowvar=False)

    def max_ks(self) -> float:
        k = self.eta.shape[1]
        return ks_distance(self.maxima, lambda x: self.eta_cdf(x) ** k)

    def orderstat_ks(self) -> list[float]:
        return [ks_distance(self.xi[:, i], lambda x, r=i + 1: orderstat_limit_cdf(r, x))
                for i in range(self.xi.shape[1])]

    def cross_correlation(self) -> list[float]:
        """``corr(eta_i, xi_i)`` per position."""
        return [float(np.corrcoef(self.eta[:, i], self.xi[:, i])[0, 1]) for i in range(self.eta.shape[1])]

    def summary(self) -> dict:
        e = self.experiment
        corr = self.correlation()
        return {
            "n": e.n,
            "k": e.k,
            "reps": e.reps,
            "seed": e.seed,
            "b_n": self.constants.b_n,
            "a_n": self.constants.a_n,
            "A_n": self.constants.A_n,
            "B_n": self.constants.B_n,
            "marginal_ks": self.marginal_ks(),
            "max_ks": self.max_ks(),
            "orderstat_ks": self.orderstat_ks(),
            "correlation": corr.tolist(),
            "eta_xi_correlation": self.cross_correlation(),
        }


def thread_count() -> int:
    """Parallelism cap from ``WPMIX_THREADS`` (default 1)."""
    raw = os.environ.get("WPMIX_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"WPMIX_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ConfigurationError(f"WPMIX_THREADS must be a positive integer, got {raw!r}")
    return value


def _one_rep(exp: ConcomitantExperiment, c: NormalizationConstants, rep: int):
    rng = substream(exp.seed, STREAM_TAG, rep)
    pairs = sample_bivariate(exp.model, exp.n, rng)
    xs, ys = top_order_statistics(pairs, exp.k)
    return (ys - c.B_n) / c.A_n, (xs - c.b_n) / c.a_n


def run_concomitant_experiment(exp: ConcomitantExperiment, *, threads: int | None = None) -> ConcomitantReport:
    """Simulate ``reps`` samples of size ``n`` and normalize their top-k concomitants.

    Replication ``r`` always uses the substream ``(seed, "concomitants", r)``
    and results are stored by replication index, so the output does not
    depend on the number of worker threads.
    """
    c = normalizing_constants(exp.model, exp.n)
    threads = thread_count() if threads is None else int(threads)
    eta = np.empty((exp.reps, exp.k))
    xi = np.empty((exp.reps, exp.k))

    def work(rep):
        eta[rep], xi[rep] = _one_rep(exp, c, rep)

    if threads == 1:
        for rep in range(exp.reps):
            work(rep)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(exp.reps)))
    return ConcomitantReport(experiment=exp, constants=c, eta=eta, xi=xi)
