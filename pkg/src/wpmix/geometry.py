"""Index partitions, L_q norms and unit-sphere samplers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ConfigurationError
from .rng import RandomStream

__all__ = [
    "IndexPartition",
    "NormSpec",
    "SphereSampler",
    "make_partition",
    "lq_norm",
    "a_norm",
    "sample_sphere",
    "COND_LIMIT",
]

# relative condition number beyond which a block is treated as singular
COND_LIMIT = 1e12


@dataclass(frozen=True)
class IndexPartition:
    """Split of ``{1, ..., d}`` into the blocks ``I`` and ``J``.

    Indices are stored 1-based as in the usual mathematical notation;
    :attr:`I0` and :attr:`J0` give the 0-based positions for array access.
    """

    d: int
    I: tuple[int, ...]
    J: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.I)

    @property
    def I0(self) -> np.ndarray:
        return np.asarray(self.I, dtype=int) - 1

    @property
    def J0(self) -> np.ndarray:
        return np.asarray(self.J, dtype=int) - 1


def make_partition(I: Iterable[int], d: int) -> IndexPartition:
    """Build the partition with block ``I`` (1-based) in dimension ``d``."""
    idx = [int(i) for i in I]
    if d < 2:
        raise ConfigurationError(f"dimension must be at least 2, got {d}")
    if not idx:
        raise ConfigurationError("index set I is empty")
    if len(set(idx)) != len(idx):
        raise ConfigurationError(f"index set I has repeated entries: {idx}")
    bad = [i for i in idx if not 1 <= i <= d]
    if bad:
        raise ConfigurationError(f"indices {bad} outside 1..{d}")
    if len(idx) >= d:
        raise ConfigurationError("I covers every coordinate; J would be empty")
    I_sorted = tuple(sorted(idx))
    J = tuple(j for j in range(1, d + 1) if j not in I_sorted)
    return IndexPartition(d=d, I=I_sorted, J=J)


@dataclass(frozen=True)
class NormSpec:
    """The L_q norm with exponent ``q >= 1``."""

    q: float = 2.0

    def __post_init__(self):
        if not (self.q >= 1.0) or not np.isfinite(self.q):
            raise ConfigurationError(f"norm exponent must lie in [1, inf), got {self.q}")


def lq_norm(x, spec: NormSpec | float = NormSpec()) -> np.ndarray | float:
    """L_q norm along the last axis.

    Scales by the largest magnitude before powering so that tiny and huge
    entries do not under- or overflow.
    """
    q = spec.q if isinstance(spec, NormSpec) else float(spec)
    arr = np.abs(np.asarray(x, dtype=float))
    if arr.shape[-1] == 0:
        raise ConfigurationError("norm of an empty vector")
    big = arr.max(axis=-1, keepdims=True)
    safe = np.where(big > 0, big, 1.0)
    if q == 2.0:
        inner = np.sqrt(np.sum((arr / safe) ** 2, axis=-1))
    elif q == 1.0:
        inner = np.sum(arr / safe, axis=-1)
    else:
        inner = np.sum((arr / safe) ** q, axis=-1) ** (1.0 / q)
    out = inner * big[..., 0]
    return float(out) if out.ndim == 0 else out


def _check_conditioning(M: np.ndarray, what: str) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise ConfigurationError(f"{what} must be square, got shape {M.shape}")
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ConfigurationError(f"{what} is singular (condition number {cond:.3g})")


def a_norm(a_J, A_JJ, spec: NormSpec | float = NormSpec()) -> float:
    """The A-weighted norm ``|| A_JJ^{-1} a_J ||_J``."""
    A_JJ = np.atleast_2d(np.asarray(A_JJ, dtype=float))
    a_J = np.atleast_1d(np.asarray(a_J, dtype=float))
    _check_conditioning(A_JJ, "A_JJ")
    return float(lq_norm(np.linalg.solve(A_JJ, a_J), spec))


@dataclass(frozen=True)
class SphereSampler:
    """Sampler for a random vector on the unit L_q sphere of ``R^dim``.

    For ``dim >= 2`` the law is the cone measure (normalized q-exponential
    coordinates). For ``dim == 1`` the sphere is ``{-1, +1}`` and
    ``plus_prob`` is the probability of ``+1``.
    """

    dim: int
    norm: NormSpec = field(default_factory=NormSpec)
    plus_prob: float = 0.5

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigurationError(f"sphere dimension must be positive, got {self.dim}")
        if not 0.0 < self.plus_prob <= 1.0:
            raise ConfigurationError(f"sign probability must lie in (0, 1], got {self.plus_prob}")

    @property
    def mode(self) -> str:
        return "rademacher" if self.dim == 1 else "cone-measure"


def sample_sphere(sampler: SphereSampler, rng: RandomStream, n: int | None = None) -> np.ndarray:
    """Draw one unit vector (``n=None``) or an ``(n, dim)`` array of them."""
    size = 1 if n is None else int(n)
    if sampler.dim == 1:
        out = np.where(rng.random((size, 1)) < sampler.plus_prob, 1.0, -1.0)
    else:
        q = sampler.norm.q
        # |Y|^q ~ Gamma(1/q) gives density proportional to exp(-|y|^q)
        mag = rng.standard_gamma(1.0 / q, size=(size, sampler.dim)) ** (1.0 / q)
        sign = np.where(rng.random((size, sampler.dim)) < 0.5, -1.0, 1.0)
        y = sign * mag
        out = y / lq_norm(y, sampler.norm)[:, None]
    return out[0] if n is None else out
