"""Intersection test for two ellipsoids and the scale at which they first touch.

Ellipsoids here are ``E(A, c) = {x : (x - c)^T A (x - c) <= 1}`` with ``A``
symmetric positive definite. For two of them, with ``v = d - c``,

    K(lam) = 1 - v^T ((1/(1-lam)) B^-1 + (1/lam) A^-1)^-1 v

is convex on (0, 1), and the closed ellipsoids intersect exactly when its
minimum is non-negative (two unit balls at distance 2 give ``min K = 0``).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .exceptions import InvalidArgument, NumericalError
from .tangent import Ellipsoid

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SolverConfig:
    lambda_tol: float = 1e-9
    margin: float = 1e-12
    radius_rel_tol: float = 1e-7
    boundary_tol: float = 1e-9

    def __post_init__(self):
        for name in ("lambda_tol", "margin", "radius_rel_tol", "boundary_tol"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be positive")
        if self.margin >= 0.5:
            raise InvalidArgument("margin must be < 0.5")


DEFAULT_CONFIG = SolverConfig()


def golden_section(f: Callable[[np.ndarray], np.ndarray], lo, hi, tol: float, maximize: bool = False):
    """Golden-section search run on many independent unimodal problems at once.

    ``f`` maps an array of abscissae (one per problem) to an array of values.
    Returns ``(x, f(x))`` arrays for the best point found per problem once
    every bracket is narrower than ``tol``.
    """
    sign = -1.0 if maximize else 1.0
    a = np.array(lo, dtype=float, ndmin=1)
    b = np.array(hi, dtype=float, ndmin=1) * np.ones_like(a)
    a = a * np.ones_like(b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    width = float(np.max(b - a)) if a.size else 0.0
    iters = 0 if width <= tol else math.ceil(math.log(tol / width) / math.log(INV_PHI))
    for _ in range(iters):
        left = fc <= fd
        # left: minimum in [a, d]; otherwise in [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = np.where(left, b - INV_PHI * (b - a), d)
        new_d = np.where(left, c, a + INV_PHI * (b - a))
        fx = sign * f(np.where(left, new_c, new_d))
        fc, fd = np.where(left, fx, fd), np.where(left, fc, fx)
        c, d = new_c, new_d
    best = np.where(fc <= fd, c, d)
    fbest = np.minimum(fc, fd)
    return best, sign * fbest


def golden_section_minimize(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-9):
    """Scalar convenience wrapper around :func:`golden_section`."""
    x, fx = golden_section(lambda t: np.array([f(float(t[0]))]), [lo], [hi], tol)
    return float(x[0]), float(fx[0])


def _spd_inverse(M):
    try:
        return cho_solve(cho_factor(M), np.eye(M.shape[0]))
    except LinAlgError as exc:
        raise NumericalError(f"matrix is not symmetric positive definite: {exc}") from None


def _k_function(A, c, B, d_):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    v = np.asarray(d_, dtype=float) - np.asarray(c, dtype=float)
    if A.shape != B.shape or A.shape != (v.size, v.size):
        raise InvalidArgument("shape matrices and centres have inconsistent dimensions")
    A_inv = _spd_inverse(A)
    B_inv = _spd_inverse(B)

    def K(lam: float) -> float:
        if not 0.0 < lam < 1.0:
            raise InvalidArgument(f"lambda must lie in (0, 1), got {lam}")
        M = B_inv / (1.0 - lam) + A_inv / lam
        try:
            w = cho_solve(cho_factor(M), v)
        except LinAlgError as exc:
            raise NumericalError(f"K({lam}) solve failed: {exc}") from None
        return 1.0 - float(v @ w)

    return K


def K_value(A, c, B, d_, lam: float) -> float:
    """Evaluate ``K(lam)`` for the ellipsoids ``E(A, c)`` and ``E(B, d_)``."""
    return _k_function(A, c, B, d_)(lam)


def min_K(A, c, B, d_, cfg: SolverConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """Minimise ``K`` over ``[margin, 1 - margin]``; returns ``(lam*, K*)``."""
    K = _k_function(A, c, B, d_)
    return golden_section_minimize(K, cfg.margin, 1.0 - cfg.margin, cfg.lambda_tol)


def ellipsoids_intersect(E1: Ellipsoid, E2: Ellipsoid, eps: float, cfg: SolverConfig = DEFAULT_CONFIG) -> bool:
    """Whether the closed ellipsoids scaled to ``eps`` share a point (tangency counts)."""
    if not eps > 0:
        raise InvalidArgument(f"eps must be positive, got {eps}")
    _, k_star = min_K(E1.shape_matrix(eps), E1.center, E2.shape_matrix(eps), E2.center, cfg)
    return k_star >= -cfg.boundary_tol


def _radii_chunk(c1, P1, r1, c2, P2, r2, cfg):
    v = c2 - c1
    # simultaneous diagonalisation of the two unit-scale covariances
    T = np.einsum("mki,mkj->mij", P1, P2)
    G = T * (r2[:, None, :] / r1[:, :, None])
    C = G @ np.swapaxes(G, 1, 2)
    try:
        mu, U = np.linalg.eigh(C)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from None
    z = np.einsum("mki,mk->mi", P1, v) / r1
    w2 = np.einsum("mki,mk->mi", U, z) ** 2

    def g(lam):
        lam = lam[:, None]
        return np.sum(w2 * (lam * (1.0 - lam)) / ((1.0 - lam) + lam * mu), axis=1)

    m = len(v)
    _, gmax = golden_section(g, np.full(m, cfg.margin), np.full(m, 1.0 - cfg.margin), cfg.lambda_tol, maximize=True)
    if not np.all(np.isfinite(gmax)):
        raise NumericalError("non-finite intersection radius")
    return np.sqrt(np.maximum(gmax, 0.0))


def intersection_radii(c1, P1, r1, c2, P2, r2, cfg: SolverConfig = DEFAULT_CONFIG,
                       n_jobs: int | None = None, chunk: int | None = None) -> np.ndarray:
    """Touching scale for many ellipsoid pairs given as stacked arrays.

    Both ellipsoids of a pair grow linearly with the scale, so ``K`` at
    scale ``eps`` is ``1 - g(lam) / eps**2`` where ``g`` is the unit-scale
    quadratic term; the first touching scale is therefore
    ``sqrt(max g)``, found with one golden-section search per pair.
    """
    c1, c2 = np.asarray(c1, float), np.asarray(c2, float)
    P1, P2 = np.asarray(P1, float), np.asarray(P2, float)
    r1, r2 = np.asarray(r1, float), np.asarray(r2, float)
    m = len(c1)
    if m == 0:
        return np.zeros(0)
    d = c1.shape[1]
    if chunk is None:
        chunk = max(256, 2_000_000 // (d * d))
    bounds = [(s, min(s + chunk, m)) for s in range(0, m, chunk)]

    def run(bound):
        s, e = bound
        return _radii_chunk(c1[s:e], P1[s:e], r1[s:e], c2[s:e], P2[s:e], r2[s:e], cfg)

    if n_jobs is not None and n_jobs > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]
    return np.concatenate(parts)


def intersection_radius(E1: Ellipsoid, E2: Ellipsoid, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Smallest scale at which ``E1`` and ``E2`` intersect."""
    if E1.d != E2.d:
        raise InvalidArgument("ellipsoids live in different dimensions")
    out = intersection_radii(E1.center[None], E1.axes[None], E1.ratios[None],
                             E2.center[None], E2.axes[None], E2.ratios[None], cfg)
    return float(out[0])


def radius_bracket(E1: Ellipsoid, E2: Ellipsoid) -> tuple[float, float]:
    """Lower and upper bounds ``D/2`` and ``D/(2 r_min)`` on the touching scale."""
    D = float(np.linalg.norm(E2.center - E1.center))
    r_min = min(float(E1.ratios.min()), float(E2.ratios.min()))
    return D / 2.0, D / (2.0 * r_min)
