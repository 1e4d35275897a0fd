"""Quadrature and root-finding helpers with uniform error reporting.

Integrals use a globally adaptive Gauss-Kronrod (10/21 point) rule whose
integrand is evaluated on whole batches of nodes at once, so integrands must
accept and return numpy arrays. Long or infinite ranges are first split at
geometric multiples of a caller supplied length scale so that the adaptive
rule starts near the region where the integrand actually lives.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import NumericalError

REL_TOL = 1e-10
ABS_TOL = 1e-14
_SPLITS = (1.0, 4.0, 16.0, 64.0, 256.0)

# Kronrod 21-point nodes (non-negative half) and weights; Gauss 10-point
# weights attach to the odd-indexed Kronrod nodes.
_XGK = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525998970, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(21)
GAUSS_WEIGHTS[1:10:2] = _WG
GAUSS_WEIGHTS[11:20:2] = _WG[::-1]


def _gk_batch(fun, a: np.ndarray, b: np.ndarray):
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(fun(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise NumericalError("integrand returned a non-finite value")
    kron = half * (fx @ KRONROD_WEIGHTS)
    gauss = half * (fx @ GAUSS_WEIGHTS)
    mean = kron / np.where(half != 0, half, 1.0) * 0.5
    resasc = half * (np.abs(fx - mean[:, None]) @ KRONROD_WEIGHTS)
    err = np.abs(kron - gauss)
    scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200.0 * err / np.where(resasc > 0, resasc, 1.0)) ** 1.5), err)
    # roundoff floor as in QUADPACK
    resabs = np.abs(half) * (np.abs(fx) @ KRONROD_WEIGHTS)
    floor = 50.0 * np.finfo(float).eps * resabs
    return kron, np.maximum(scaled, floor)


def gauss_kronrod(fun: Callable[[np.ndarray], np.ndarray], a: float, b: float, *,
                  rel: float = REL_TOL, abs_: float = ABS_TOL, max_intervals: int = 4000,
                  scale: float | None = None) -> float:
    """Globally adaptive Gauss-Kronrod integral of a vectorized ``fun``.

    ``b`` may be ``inf``; the tail is then mapped to ``[0, 1)`` through
    ``x = a + scale * u / (1 - u)``. The scale defaults to ``max(|a|, 1)``,
    which suits tails decaying on the order of their starting point.
    """
    if not b > a:
        return 0.0
    if math.isinf(b):
        base, start = fun, a
        L = max(abs(a), 1.0) if scale is None else float(scale)

        def fun(u):
            one_minus = 1.0 - u
            return base(start + L * u / one_minus) * (L / one_minus**2)

        a, b = 0.0, 1.0
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    val, err = _gk_batch(fun, lo, hi)
    while True:
        total = float(val.sum())
        tol = max(abs_, rel * abs(total))
        if float(err.sum()) <= tol:
            return total
        if len(lo) >= max_intervals:
            break
        order = np.argsort(err)[::-1]
        remaining = np.cumsum(err[order][::-1])[::-1]
        # split the largest-error intervals until the rest fit in half the budget
        count = int(np.searchsorted(-remaining, -0.5 * tol, side="left"))
        count = max(1, min(count + 1, len(order)))
        pick = order[:count]
        width = hi[pick] - lo[pick]
        splittable = width > 1e-14 * np.maximum(np.abs(lo[pick]), np.abs(hi[pick]))
        if not np.any(splittable):
            break
        pick = pick[splittable]
        mid = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        new_val, new_err = _gk_batch(fun, new_lo, new_hi)
        keep = np.ones(len(lo), dtype=bool)
        keep[pick] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])
    total = float(val.sum())
    if float(err.sum()) > max(1e-7 * abs(total), 1e3 * abs_):
        raise NumericalError(
            f"quadrature on [{a}, {b}] did not converge (value {total:.6g}, error {float(err.sum()):.3g})"
        )
    return total


def _lower_singular(fun, a: float, b: float, e: float, rel: float, abs_: float) -> float:
    # x - a = v^(1/(e+1)) turns (x - a)^e into a smooth integrand
    k = 1.0 / (e + 1.0)

    def smooth(v):
        return fun(a + v**k) * (k * v ** (k - 1.0))

    return gauss_kronrod(smooth, 0.0, (b - a) ** (e + 1.0), rel=rel, abs_=abs_)


def gauss_kronrod_pieces(fun: Callable[[np.ndarray], np.ndarray], edges, *, rel: float = REL_TOL,
                         abs_: float = ABS_TOL, max_rounds: int = 60) -> np.ndarray:
    """Integrals of ``fun`` over every interval ``[edges[i], edges[i+1]]``.

    All pieces are refined together, so a fine partition costs one batched
    integrand call per refinement round. Each piece must reach
    ``max(abs_, rel * |value|)`` on its own.
    """
    edges = np.asarray(edges, dtype=float)
    npieces = len(edges) - 1
    if npieces < 1:
        return np.zeros(0)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    owner = np.arange(npieces)
    done_val = np.zeros(npieces)
    val, err = _gk_batch(fun, lo, hi)
    for _ in range(max_rounds):
        piece_val = done_val + np.bincount(owner, weights=val, minlength=npieces)
        piece_err = np.bincount(owner, weights=err, minlength=npieces)
        tol = np.maximum(abs_, rel * np.abs(piece_val))
        bad = piece_err[owner] > tol[owner]
        width = hi - lo
        bad &= width > 1e-14 * np.maximum(np.abs(lo), np.abs(hi))
        if not np.any(bad):
            return piece_val
        good = ~bad
        done_val += np.bincount(owner[good], weights=val[good], minlength=npieces)
        lo, hi, owner = lo[bad], hi[bad], owner[bad]
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        owner = np.concatenate([owner, owner])
        val, err = _gk_batch(fun, lo, hi)
    raise NumericalError(f"piecewise quadrature did not converge in {max_rounds} rounds")


def quad(fun, a: float, b: float, *, rel: float = REL_TOL, abs_: float = ABS_TOL,
         singular_exponent: float = 0.0, upper_exponent: float = 0.0, scale: float | None = None) -> float:
    """Integrate ``fun`` over ``[a, b]``.

    A ``singular_exponent`` e > -1 announces ``fun(x) ~ (x - a)^e`` near ``a``
    and ``upper_exponent`` announces ``fun(x) ~ (b - x)^e`` near a finite ``b``.
    Power substitutions then remove the endpoint singularities. With an upper
    exponent the last piece calls ``fun(x, gap)`` where ``gap = b - x`` keeps
    full relative precision (``x`` itself rounds to ``b`` near the end), so
    such integrands take an optional second argument. ``scale`` sets the
    length scale of the map used for an infinite ``b``.
    """
    if not b > a:
        return 0.0
    lower = singular_exponent != 0.0
    upper = upper_exponent != 0.0 and math.isfinite(b)
    if lower and upper:
        mid = 0.5 * (a + b)
        return (quad(fun, a, mid, rel=rel, abs_=abs_, singular_exponent=singular_exponent)
                + quad(fun, mid, b, rel=rel, abs_=abs_, upper_exponent=upper_exponent))
    if upper:
        return _lower_singular(lambda y: fun(b - y, y), 0.0, b - a, upper_exponent, rel, abs_)
    if lower and math.isfinite(b):
        return _lower_singular(fun, a, b, singular_exponent, rel, abs_)
    return gauss_kronrod(fun, a, b, rel=rel, abs_=abs_, scale=scale)


def quad_split(fun, a: float, b: float, length: float, *, singular_exponent: float = 0.0,
               upper_exponent: float = 0.0, rel: float = REL_TOL, abs_: float = ABS_TOL) -> float:
    """Integrate over ``[a, b]`` (``b`` may be ``inf``) in geometric pieces.

    Pieces end at ``a + k * length`` for ``k`` in 1, 4, 16, 64, 256. The
    endpoint exponents apply to the first and last piece, see :func:`quad`.
    """
    if not b > a:
        return 0.0
    if not (length > 0 and math.isfinite(length)):
        length = 1.0 if not math.isfinite(b) else (b - a)
    cuts = [a + k * length for k in _SPLITS if a + k * length < b]
    edges = [a, *cuts, b]
    total = 0.0
    last = len(edges) - 2
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        total += quad(fun, lo, hi, rel=rel, abs_=abs_,
                      singular_exponent=singular_exponent if i == 0 else 0.0,
                      upper_exponent=upper_exponent if i == last else 0.0,
                      scale=max(lo - a, length))
    return total


def brentq(fun: Callable[[float], float], lo: float, hi: float, *, xtol: float = 1e-300,
           rtol: float = 4 * np.finfo(float).eps, maxiter: int = 200) -> float:
    """Bracketed root with a :class:`NumericalError` on failure."""
    try:
        root, info = optimize.brentq(fun, lo, hi, xtol=xtol, rtol=rtol, maxiter=maxiter,
                                     full_output=True, disp=False)
    except ValueError as exc:
        raise NumericalError(f"root not bracketed in [{lo}, {hi}]: {exc}") from exc
    if not info.converged:
        raise NumericalError(f"root finding did not converge after {maxiter} iterations")
    return float(root)


def expand_bracket(fun: Callable[[float], float], lo: float, hi: float, *,
                   upper_limit: float = math.inf, factor: float = 2.0, tries: int = 200) -> float:
    """Grow ``hi`` until ``fun`` changes sign between ``lo`` and ``hi``."""
    flo = fun(lo)
    for _ in range(tries):
        if np.sign(fun(hi)) != np.sign(flo):
            return hi
        if hi >= upper_limit:
            break
        hi = min(lo + (hi - lo) * factor, upper_limit)
    raise NumericalError("could not bracket root")


def bisect_newton(fun, dfun, lo, hi, x0=None, *, tol: float = 1e-15, maxiter: int = 200):
    """Vectorized safeguarded Newton iteration for increasing ``fun``.

    ``fun`` must be increasing in its argument on every bracket
    ``[lo[i], hi[i]]`` and change sign there.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    x = 0.5 * (lo + hi) if x0 is None else np.clip(np.asarray(x0, dtype=float), lo, hi)
    for _ in range(maxiter):
        fx = fun(x)
        lo = np.where(fx < 0, x, lo)
        hi = np.where(fx > 0, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - fx / dfun(x)
        bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        done = (np.abs(xn - x) <= tol * np.maximum(np.abs(xn), 1e-300)) | (fx == 0)
        x = np.where(fx == 0, x, xn)
        if np.all(done):
            return x
    return x
