"""Local PCA frames and the per-point ellipsoids built from them."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import InvalidArgument
from .pointcloud import PointCloud, as_point_cloud

DEFAULT_K = 5
# above this dimension a k-d tree is no faster than a brute-force scan
KDTREE_MAX_DIM = 16


@dataclass(frozen=True)
class Ellipsoid:
    """Centre, orthonormal axes (columns, major first) and axis ratios.

    At filtration scale ``eps`` semi-axis ``i`` has length ``eps * ratios[i]``.
    """

    center: np.ndarray
    axes: np.ndarray
    ratios: np.ndarray

    def __post_init__(self):
        c = np.array(self.center, dtype=float).reshape(-1)
        P = np.array(self.axes, dtype=float)
        r = np.array(self.ratios, dtype=float).reshape(-1)
        d = c.size
        if P.shape != (d, d) or r.size != d:
            raise InvalidArgument(f"inconsistent ellipsoid shapes: center {c.shape}, axes {P.shape}, ratios {r.shape}")
        if np.any(r <= 0) or np.any(r > 1) or r[0] != 1.0 or np.any(np.diff(r) > 0):
            raise InvalidArgument(f"ratios must be non-increasing in (0, 1] with maximum 1, got {r}")
        if np.max(np.abs(P.T @ P - np.eye(d))) > 1e-9:
            raise InvalidArgument("ellipsoid axes are not orthonormal")
        for a in (c, P, r):
            a.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "axes", P)
        object.__setattr__(self, "ratios", r)

    @property
    def d(self) -> int:
        return self.center.size

    def shape_matrix(self, eps: float = 1.0) -> np.ndarray:
        """Quadratic form ``A`` with the ellipsoid ``{x : (x-c)^T A (x-c) <= 1}``."""
        return (self.axes / (eps * self.ratios) ** 2) @ self.axes.T

    def covariance(self, eps: float = 1.0) -> np.ndarray:
        """Inverse of :meth:`shape_matrix`, available without a solve."""
        return (self.axes * (eps * self.ratios) ** 2) @ self.axes.T

    def contains(self, x, eps: float = 1.0) -> np.ndarray:
        """Membership of point(s) ``x`` in the closed ellipsoid at scale ``eps``."""
        y = (np.atleast_2d(x) - self.center) @ self.axes / (eps * self.ratios)
        return np.einsum("ij,ij->i", y, y) <= 1.0


@dataclass(frozen=True)
class RatioSpec:
    """Axis ratios, either as ``q`` with an intrinsic dimension or explicitly.

    ``RatioSpec(q=3, intrinsic_dim=1)`` in ``d=3`` gives ``[1, 1/3, 1/3]``;
    ``RatioSpec(ratios=[3, 1])`` gives ``[1, 1/3]``.
    """

    q: Optional[float] = None
    intrinsic_dim: int = 1
    ratios: Optional[tuple] = None

    def __post_init__(self):
        if (self.q is None) == (self.ratios is None):
            raise InvalidArgument("give exactly one of q or ratios")
        if self.q is not None:
            if not self.q >= 1:
                raise InvalidArgument(f"q must be >= 1, got {self.q}")
            if self.intrinsic_dim < 1:
                raise InvalidArgument(f"intrinsic_dim must be >= 1, got {self.intrinsic_dim}")
        else:
            r = tuple(float(v) for v in self.ratios)
            if not r or any(not np.isfinite(v) or v <= 0 for v in r):
                raise InvalidArgument(f"explicit ratios must be positive, got {self.ratios}")
            object.__setattr__(self, "ratios", r)

    def expand(self, d: int) -> np.ndarray:
        if self.q is not None:
            if self.intrinsic_dim > d:
                raise InvalidArgument(f"intrinsic_dim {self.intrinsic_dim} exceeds ambient dimension {d}")
            out = np.full(d, 1.0 / self.q)
            out[: self.intrinsic_dim] = 1.0
            return out
        if len(self.ratios) != d:
            raise InvalidArgument(f"expected {d} ratios, got {len(self.ratios)}")
        r = np.sort(np.array(self.ratios))[::-1]
        return r / r[0]

    @property
    def max_elongation(self) -> float:
        """Ratio of the longest to the shortest semi-axis (``q``)."""
        if self.q is not None:
            return float(self.q)
        return max(self.ratios) / min(self.ratios)


def _neighbour_order(points, index, candidates):
    cand = np.asarray([c for c in candidates if c != index], dtype=int)
    diff = points[cand] - points[index]
    dist2 = np.einsum("ij,ij->i", diff, diff)
    return cand[np.lexsort((cand, dist2))]


def k_nearest_neighbours(cloud, index: int, k: int = DEFAULT_K, tree: Optional[cKDTree] = None) -> np.ndarray:
    """Ids of the ``k`` points closest to point ``index`` (itself excluded).

    Ties in distance go to the smaller point id.
    """
    cloud = as_point_cloud(cloud)
    n = cloud.n
    if not 1 <= k <= n - 1:
        raise InvalidArgument(f"k must be in [1, {n - 1}], got {k}")
    if not 0 <= index < n:
        raise InvalidArgument(f"point index {index} out of range")
    pts = cloud.points
    if tree is None and cloud.d <= KDTREE_MAX_DIM and n > 64:
        tree = cKDTree(pts)
    if tree is None:
        return _neighbour_order(pts, index, range(n))[:k]
    # the k-th distance, then every point within it, so ties are seen in full
    dist, _ = tree.query(pts[index], k=k + 1)
    radius = float(dist[-1])
    cand = tree.query_ball_point(pts[index], radius * (1 + 1e-9) + 1e-300)
    return _neighbour_order(pts, index, cand)[:k]


def _first_nonzero_positive(P, tol=1e-12):
    for j in range(P.shape[1]):
        col = P[:, j]
        nz = np.flatnonzero(np.abs(col) > tol)
        if nz.size and col[nz[0]] < 0:
            P[:, j] = -col
    return P


def pca_frame(neighbourhood) -> tuple[np.ndarray, np.ndarray]:
    """Principal axes (columns) and non-increasing eigenvalues of a point set.

    The covariance is taken about the neighbourhood mean. Directions with
    numerically zero variance are completed by Gram-Schmidt against the
    standard basis, and each axis is signed so its first nonzero coordinate
    is positive.
    """
    X = np.atleast_2d(np.asarray(neighbourhood, dtype=float))
    if X.shape[0] == 0:
        raise InvalidArgument("empty neighbourhood")
    d = X.shape[1]
    Y = X - X.mean(axis=0)
    cov = Y.T @ Y / X.shape[0]
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(-evals, kind="stable")
    evals, evecs = evals[order], evecs[:, order]
    scale = max(float(evals[0]), 0.0)
    rank = int(np.sum(evals > max(scale, np.finfo(float).tiny) * 1e-10)) if scale > 0 else 0
    if rank < d:
        basis = [evecs[:, j] for j in range(rank)]
        for e in np.eye(d):
            if len(basis) == d:
                break
            v = e.copy()
            for _ in range(2):  # re-orthogonalise once for stability
                for b in basis:
                    v -= (b @ v) * b
            norm = np.linalg.norm(v)
            if norm > 1e-8:
                basis.append(v / norm)
        evecs = np.column_stack(basis)
        evals = np.concatenate([evals[:rank], np.zeros(d - rank)])
    evals = np.maximum(evals, 0.0)
    return _first_nonzero_positive(evecs.copy()), evals


def construct_ellipsoids(cloud, k: int = DEFAULT_K, ratios: Optional[RatioSpec] = None,
                         n_jobs: Optional[int] = None) -> list[Ellipsoid]:
    """One ellipsoid per point, with axes from PCA over the point and its k neighbours."""
    cloud = as_point_cloud(cloud)
    if ratios is None:
        ratios = RatioSpec(q=1.0)
    r = ratios.expand(cloud.d)
    n = cloud.n
    pts = cloud.points
    if n == 1:
        return [Ellipsoid(pts[0], np.eye(cloud.d), r)]
    if not 1 <= k <= n - 1:
        raise InvalidArgument(f"k must be in [1, {n - 1}], got {k}")
    tree = cKDTree(pts) if cloud.d <= KDTREE_MAX_DIM else None

    def build(i):
        nbrs = k_nearest_neighbours(cloud, i, k, tree=tree)
        axes, _ = pca_frame(pts[np.concatenate([[i], nbrs])])
        return Ellipsoid(pts[i], axes, r)

    if n_jobs is not None and n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            return list(pool.map(build, range(n)))
    return [build(i) for i in range(n)]


def stack_ellipsoids(ellipsoids: Sequence[Ellipsoid]):
    """Centres ``(n, d)``, axes ``(n, d, d)`` and ratios ``(n, d)`` as arrays."""
    centers = np.array([e.center for e in ellipsoids])
    axes = np.array([e.axes for e in ellipsoids])
    ratios = np.array([e.ratios for e in ellipsoids])
    return centers, axes, ratios
