"""Persistent homology of point clouds via ellipsoid complexes, with a Rips baseline."""

__version__ = "0.1.0"

from .complex import (
    FilteredComplex,
    build_ellipsoid_edges,
    build_rips_edges,
    default_rmax,
    ellipsoid_complex,
    expand_flag,
    rips_complex,
)
from .descriptors import SignatureVector, loo_nn_classify, top_lifespans
from .estimators import EllipsoidPersistence, LifespanSignature, RipsPersistence
from .exceptions import (
    EmptyInput,
    InternalError,
    InvalidArgument,
    InvalidComplex,
    NumericalError,
    ParseError,
)
from .geometry import (
    SolverConfig,
    K_value,
    ellipsoids_intersect,
    intersection_radius,
    min_K,
)
from .persistence import Barcode, betti_numbers_at, compute_persistence, sort_filtration
from .pointcloud import (
    PointCloud,
    TransformSpec,
    apply_transformation,
    generate_circle,
    generate_disk_with_holes,
    generate_dog_bone,
    generate_figure_eight,
    load_point_cloud,
    save_point_cloud,
    subsample,
)
from .tangent import Ellipsoid, RatioSpec, construct_ellipsoids, k_nearest_neighbours, pca_frame
