"""scikit-learn compatible transformers for ellipsoid and Rips barcodes.

A typical classification pipeline::

    make_pipeline(EllipsoidPersistence(q=3), LifespanSignature(k=10),
                  KNeighborsClassifier(n_neighbors=1))

The persistence transformers take a sequence of point clouds (each an
``(n_i, d)`` array or :class:`PointCloud`) and return a list of
:class:`Barcode` objects; :class:`LifespanSignature` turns those into a
dense feature matrix.
"""

from __future__ import annotations

import numbers
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .complex import default_rmax, ellipsoid_complex, rips_complex
from .descriptors import DEFAULT_TOP_K, top_lifespans
from .exceptions import InvalidArgument
from .geometry import SolverConfig
from .persistence import Barcode, compute_persistence
from .pointcloud import PointCloud
from .tangent import DEFAULT_K, RatioSpec, construct_ellipsoids


def check_point_cloud(X, min_points: int = 1) -> PointCloud:
    """Validate one point cloud and return it as a :class:`PointCloud`."""
    if isinstance(X, PointCloud):
        cloud = X
    else:
        arr = np.asarray(X, dtype=float)
        if arr.ndim != 2:
            raise InvalidArgument(f"a point cloud must be a 2-D array, got {arr.ndim}-D")
        cloud = PointCloud(arr)
    if cloud.n < min_points:
        raise InvalidArgument(f"point cloud has {cloud.n} points, need at least {min_points}")
    return cloud


def check_cloud_collection(X, min_points: int = 1) -> list:
    """Validate a sequence of point clouds (a 3-D array also works)."""
    if isinstance(X, (PointCloud, np.ndarray)) and np.ndim(X) == 2:
        raise InvalidArgument("expected a collection of point clouds; wrap a single cloud in a list")
    clouds = [check_point_cloud(c, min_points) for c in X]
    if not clouds:
        raise InvalidArgument("empty collection of point clouds")
    return clouds


def _check_positive(name, value, allow_none=False):
    if value is None and allow_none:
        return
    if not isinstance(value, numbers.Real) or not value > 0:
        raise InvalidArgument(f"{name} must be a positive number, got {value!r}")


class _BasePersistence(TransformerMixin, BaseEstimator):
    def _validate_common(self):
        _check_positive("rmax", self.rmax, allow_none=True)
        if not isinstance(self.max_degree, numbers.Integral) or self.max_degree < 0:
            raise InvalidArgument(f"max_degree must be a non-negative integer, got {self.max_degree!r}")
        if self.dmax is not None and (not isinstance(self.dmax, numbers.Integral) or self.dmax < 1):
            raise InvalidArgument(f"dmax must be a positive integer, got {self.dmax!r}")

    @property
    def dmax_(self) -> int:
        return self.dmax if self.dmax is not None else self.max_degree + 1

    def fit(self, X=None, y=None):
        """Validate hyper-parameters; the transformation itself is stateless."""
        self._validate()
        self.is_fitted_ = True
        return self

    def transform(self, X) -> list:
        check_is_fitted(self, "is_fitted_")
        return [self.barcode(c) for c in check_cloud_collection(X)]

    def barcode(self, cloud) -> Barcode:
        """Barcode of a single point cloud."""
        cx = self.complex(check_point_cloud(cloud))
        return compute_persistence(cx, self.max_degree)

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.two_d_array = False
        tags.requires_fit = False
        return tags


class RipsPersistence(_BasePersistence):
    """Vietoris-Rips barcodes, with edges valued at half the point distance."""

    def __init__(self, rmax: Optional[float] = None, max_degree: int = 1, dmax: Optional[int] = None):
        self.rmax = rmax
        self.max_degree = max_degree
        self.dmax = dmax

    def _validate(self):
        self._validate_common()

    def complex(self, cloud):
        self._validate()
        cloud = check_point_cloud(cloud)
        rmax = self.rmax if self.rmax is not None else default_rmax(cloud, 1.0)
        if rmax <= 0:  # single point or all points coincide
            rmax = 1.0
        return rips_complex(cloud, rmax, self.dmax_)


class EllipsoidPersistence(_BasePersistence):
    """Ellipsoid-complex barcodes.

    Each point gets an ellipsoid aligned with a local PCA frame over itself
    and its ``k`` nearest neighbours; the leading ``intrinsic_dim`` axes
    have ratio 1 and the rest ``1/q`` (or ``ratios`` gives all of them
    explicitly). Two points are joined at the scale where their ellipsoids
    first touch.
    """

    def __init__(self, k: int = DEFAULT_K, q: float = 3.0, intrinsic_dim: int = 1, ratios=None,
                 rmax: Optional[float] = None, max_degree: int = 1, dmax: Optional[int] = None,
                 lambda_tol: float = 1e-9, radius_rel_tol: float = 1e-7, n_jobs: Optional[int] = None):
        self.k = k
        self.q = q
        self.intrinsic_dim = intrinsic_dim
        self.ratios = ratios
        self.rmax = rmax
        self.max_degree = max_degree
        self.dmax = dmax
        self.lambda_tol = lambda_tol
        self.radius_rel_tol = radius_rel_tol
        self.n_jobs = n_jobs

    def _validate(self):
        self._validate_common()
        if not isinstance(self.k, numbers.Integral) or self.k < 1:
            raise InvalidArgument(f"k must be a positive integer, got {self.k!r}")
        self.ratio_spec_ = self._ratio_spec()
        self.solver_config_ = SolverConfig(lambda_tol=self.lambda_tol, radius_rel_tol=self.radius_rel_tol)

    def _ratio_spec(self) -> RatioSpec:
        if self.ratios is not None:
            return RatioSpec(ratios=tuple(self.ratios))
        return RatioSpec(q=self.q, intrinsic_dim=self.intrinsic_dim)

    def ellipsoids(self, cloud):
        self._validate()
        cloud = check_point_cloud(cloud)
        k = min(self.k, cloud.n - 1) if cloud.n > 1 else self.k
        return construct_ellipsoids(cloud, k, self.ratio_spec_, n_jobs=self.n_jobs)

    def complex(self, cloud):
        cloud = check_point_cloud(cloud)
        ellipsoids = self.ellipsoids(cloud)
        rmax = self.rmax if self.rmax is not None else default_rmax(cloud, self.ratio_spec_.max_elongation)
        if rmax <= 0:
            rmax = 1.0
        cx = ellipsoid_complex(cloud, ellipsoids, rmax, self.dmax_, self.solver_config_, n_jobs=self.n_jobs)
        cx.meta.update(k=self.k, ratios=list(self.ratio_spec_.expand(cloud.d)))
        return cx


class LifespanSignature(TransformerMixin, BaseEstimator):
    """Top-``k`` lifespans per homology degree as a fixed-length feature row.

    ``cap`` replaces infinite deaths; by default each barcode's own ``rmax``.
    """

    def __init__(self, degrees=(0, 1), k: int = DEFAULT_TOP_K, cap: Optional[float] = None):
        self.degrees = degrees
        self.k = k
        self.cap = cap

    def fit(self, X=None, y=None):
        if not isinstance(self.k, numbers.Integral) or self.k < 1:
            raise InvalidArgument(f"k must be a positive integer, got {self.k!r}")
        _check_positive("cap", self.cap, allow_none=True)
        self.n_features_out_ = self.k * len(set(self.degrees))
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "n_features_out_")
        rows = []
        for bc in X:
            if not isinstance(bc, Barcode):
                raise InvalidArgument(f"expected Barcode objects, got {type(bc).__name__}")
            cap = self.cap if self.cap is not None else bc.rmax
            rows.append(top_lifespans(bc, self.degrees, self.k, cap).values)
        return np.array(rows).reshape(len(rows), self.n_features_out_)

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.two_d_array = False
        tags.requires_fit = False
        return tags
