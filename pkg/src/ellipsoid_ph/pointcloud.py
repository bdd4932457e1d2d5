"""Point clouds: file I/O, synthetic generators and random transformations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .exceptions import EmptyInput, InternalError, InvalidArgument, ParseError

PathLike = Union[str, Path]

HOLE_COUNTS = (0, 1, 2, 4, 9)
HOLE_RADIUS = 0.18

# fixed hole templates inside the unit disk, keyed by hole count
_HOLE_CENTERS = {
    0: np.zeros((0, 2)),
    1: np.array([[0.0, 0.0]]),
    2: np.array([[-0.4, 0.0], [0.4, 0.0]]),
    4: np.array([[-0.35, -0.35], [0.35, -0.35], [-0.35, 0.35], [0.35, 0.35]]),
    9: np.array([[x, y] for y in (-0.45, 0.0, 0.45) for x in (-0.45, 0.0, 0.45)]),
}

# dog-bone region: two unit disks at (+-2, 0) joined by a neck of half-width 0.7
DOG_BONE_CENTER = 2.0
DOG_BONE_RADIUS = 1.0
DOG_BONE_NECK = 0.7


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator used by every stochastic operation."""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


@dataclass(frozen=True)
class PointCloud:
    """An ordered, immutable set of ``n`` points in ``R^d``.

    Point indices are identities: every downstream structure (ellipsoids,
    edges, simplices) refers to points by their row number.
    """

    points: np.ndarray
    label: Optional[int] = None
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if pts.size else pts.reshape(0, 1)
        if pts.ndim != 2:
            raise InvalidArgument(f"points must be a 2-D array, got shape {pts.shape}")
        if pts.shape[0] == 0:
            raise EmptyInput("point cloud has no points")
        if pts.shape[1] == 0:
            raise InvalidArgument("points must have at least one coordinate")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgument("point coordinates must be finite")
        if self.label is not None and (int(self.label) != self.label or self.label < 0):
            raise InvalidArgument(f"label must be a non-negative integer, got {self.label!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.points, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, PointCloud):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.points.tobytes(), self.points.shape, self.label))

    def diameter(self) -> float:
        """Largest pairwise Euclidean distance."""
        from scipy.spatial.distance import pdist

        if self.n < 2:
            return 0.0
        return float(pdist(self.points).max())


def as_point_cloud(X) -> PointCloud:
    if isinstance(X, PointCloud):
        return X
    return PointCloud(np.asarray(X, dtype=float))


# --------------------------------------------------------------------------
# file I/O


def _split_fields(line: str) -> list[str]:
    if "," in line:
        return [f.strip() for f in line.split(",")]
    return line.split()


def load_point_cloud(path: PathLike, format: Optional[str] = None) -> PointCloud:
    """Read a point cloud from a delimited text file.

    Fields may be separated by commas or whitespace (``format`` is accepted
    for interface symmetry; both ``"csv"`` and ``"tsv"`` use the same
    tolerant parser). Blank lines and lines starting with ``#`` are skipped.
    Row ``i`` of the data becomes point ``i``.
    """
    if format not in (None, "csv", "tsv"):
        raise InvalidArgument(f"unknown point-cloud format {format!r}")
    rows: list[list[float]] = []
    width = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = _split_fields(line)
            try:
                values = [float(f) for f in fields]
            except ValueError:
                raise ParseError(f"non-numeric field in {line!r}", row=lineno) from None
            if not all(math.isfinite(v) for v in values):
                raise ParseError("non-finite coordinate", row=lineno)
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ParseError(f"expected {width} fields, found {len(values)}", row=lineno)
            rows.append(values)
    if not rows:
        raise EmptyInput(f"{path}: no points found")
    return PointCloud(np.array(rows, dtype=float))


def save_point_cloud(cloud: PointCloud, path: PathLike, header: Sequence[str] = ()) -> None:
    """Write ``cloud`` as comma-separated text with 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        if cloud.label is not None:
            fh.write(f"# label={cloud.label}\n")
        for row in cloud.points:
            fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")


def subsample(cloud: PointCloud, m: int, seed: int = 0) -> PointCloud:
    """Uniform random subsample of ``m`` distinct points (without replacement).

    The chosen points keep their relative order from the input cloud.
    """
    if m < 1 or m > cloud.n:
        raise InvalidArgument(f"subsample size must be in [1, {cloud.n}], got {m}")
    idx = np.sort(make_rng(seed).choice(cloud.n, size=m, replace=False))
    return PointCloud(cloud.points[idx], label=cloud.label)


# --------------------------------------------------------------------------
# generators


def _check_noise(noise_sigma):
    if noise_sigma < 0:
        raise InvalidArgument(f"noise_sigma must be >= 0, got {noise_sigma}")


def _add_noise(points, noise_sigma, seed):
    if noise_sigma > 0:
        points = points + make_rng(seed).normal(0.0, noise_sigma, size=points.shape)
    return points


def generate_circle(n: int, radius: float = 1.0, noise_sigma: float = 0.0, seed: int = 0) -> PointCloud:
    """``n`` evenly spaced points on a circle, plus optional isotropic noise."""
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    if radius <= 0:
        raise InvalidArgument(f"radius must be positive, got {radius}")
    _check_noise(noise_sigma)
    theta = 2.0 * np.pi * np.arange(n) / n
    pts = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    return PointCloud(_add_noise(pts, noise_sigma, seed))


def generate_figure_eight(n: int, scale: float = 1.0, noise_sigma: float = 0.0, seed: int = 0) -> PointCloud:
    """Lemniscate ``(s sin t, s sin t cos t)`` at evenly spaced ``t`` in [0, 2pi)."""
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    if scale <= 0:
        raise InvalidArgument(f"scale must be positive, got {scale}")
    _check_noise(noise_sigma)
    t = 2.0 * np.pi * np.arange(n) / n
    pts = scale * np.column_stack([np.sin(t), np.sin(t) * np.cos(t)])
    return PointCloud(_add_noise(pts, noise_sigma, seed))


def _dog_bone_pieces(neck=DOG_BONE_NECK):
    """Boundary pieces as (kind, params, length), traversed counter-clockwise."""
    a = math.asin(neck / DOG_BONE_RADIUS)
    x_neck = DOG_BONE_CENTER - DOG_BONE_RADIUS * math.cos(a)
    seg = 2.0 * x_neck
    arc = 2.0 * (math.pi - a) * DOG_BONE_RADIUS
    return [
        # right lobe: from the bottom neck corner round to the top one
        ("arc", (DOG_BONE_CENTER, -(math.pi - a)), arc),
        ("seg", ((x_neck, neck), (-x_neck, neck)), seg),
        ("arc", (-DOG_BONE_CENTER, a), arc),
        ("seg", ((-x_neck, -neck), (x_neck, -neck)), seg),
    ]


def dog_bone_distance(points, neck: float = DOG_BONE_NECK) -> np.ndarray:
    """Distance from each point to the dog-bone boundary curve."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.full(len(pts), np.inf)
    for kind, params, length in _dog_bone_pieces(neck):
        if kind == "arc":
            cx, start = params
            rel = pts - np.array([cx, 0.0])
            ang = np.mod(np.arctan2(rel[:, 1], rel[:, 0]) - start, 2 * np.pi)
            span = length / DOG_BONE_RADIUS
            on_arc = np.abs(np.hypot(rel[:, 0], rel[:, 1]) - DOG_BONE_RADIUS)
            ends = np.array([
                [cx + DOG_BONE_RADIUS * math.cos(start), DOG_BONE_RADIUS * math.sin(start)],
                [cx + DOG_BONE_RADIUS * math.cos(start + span), DOG_BONE_RADIUS * math.sin(start + span)],
            ])
            to_ends = np.min(np.linalg.norm(pts[:, None, :] - ends[None], axis=2), axis=1)
            dist = np.where(ang <= span, on_arc, to_ends)
        else:
            p0, p1 = np.array(params[0]), np.array(params[1])
            seg = p1 - p0
            t = np.clip((pts - p0) @ seg / (seg @ seg), 0.0, 1.0)
            dist = np.linalg.norm(pts - (p0 + t[:, None] * seg), axis=1)
        out = np.minimum(out, dist)
    return out


def generate_dog_bone(n: int = 200, seed: int = 0, neck: float = DOG_BONE_NECK) -> PointCloud:
    """``n`` points spaced evenly by arc length on the dog-bone boundary.

    The region is two unit disks centred at ``(+-2, 0)`` joined by the
    rectangle ``[-2, 2] x [-0.25, 0.25]``; its boundary is one closed curve
    with a narrow neck. The seed only sets the starting arc-length offset.
    """
    if n < 8:
        raise InvalidArgument(f"dog bone needs n >= 8, got {n}")
    pieces = _dog_bone_pieces(neck)
    total = sum(p[2] for p in pieces)
    s = (np.arange(n) + make_rng(seed).random()) * total / n
    pts = np.empty((n, 2))
    offset = 0.0
    for kind, params, length in pieces:
        mask = (s >= offset) & (s < offset + length)
        local = s[mask] - offset
        if kind == "arc":
            cx, start = params
            ang = start + local / DOG_BONE_RADIUS
            pts[mask] = np.column_stack([cx + DOG_BONE_RADIUS * np.cos(ang), DOG_BONE_RADIUS * np.sin(ang)])
        else:
            p0, p1 = np.array(params[0]), np.array(params[1])
            pts[mask] = p0 + (local / length)[:, None] * (p1 - p0)
        offset += length
    return PointCloud(pts)


def hole_centers(holes: int) -> np.ndarray:
    if holes not in _HOLE_CENTERS:
        raise InvalidArgument(f"holes must be one of {HOLE_COUNTS}, got {holes}")
    return _HOLE_CENTERS[holes].copy()


def generate_disk_with_holes(n: int = 301, holes: int = 1, seed: int = 0,
                             hole_radius: float = HOLE_RADIUS) -> PointCloud:
    """Uniform sample of the unit disk minus ``holes`` round holes of radius 0.18.

    The label is the position of ``holes`` in ``HOLE_COUNTS``.
    """
    centers = hole_centers(holes)
    if n < 50:
        raise InvalidArgument(f"disk with holes needs n >= 50, got {n}")
    rng = make_rng(seed)
    accepted: list[np.ndarray] = []
    count = 0
    for _ in range(10_000):
        cand = rng.uniform(-1.0, 1.0, size=(4 * n, 2))
        keep = np.einsum("ij,ij->i", cand, cand) <= 1.0
        for c in centers:
            keep &= np.linalg.norm(cand - c, axis=1) > hole_radius
        accepted.append(cand[keep])
        count += int(keep.sum())
        if count >= n:
            break
    else:
        raise InternalError("rejection sampling did not converge")
    pts = np.concatenate(accepted)[:n]
    return PointCloud(pts, label=HOLE_COUNTS.index(holes))


# --------------------------------------------------------------------------
# transformations

TRANSFORM_KINDS = ("translation", "rotation", "stretch", "shear", "gaussian_noise", "outliers")

# default parameter ranges (rotation in degrees, clockwise)
DEFAULT_RANGES = {
    "translation": (-1.0, 1.0),
    "rotation": (-20.0, 20.0),
    "stretch": (0.8, 1.2),
    "shear": (-0.2, 0.2),
    "gaussian_noise": (0.0, 0.1),
    "outliers": (0.0, 0.1),
}


@dataclass(frozen=True)
class TransformSpec:
    """A random transformation: its kind, the parameter range and a seed.

    ``low``/``high`` override the default parameter range of ``kind``; set
    them equal to pin the parameter.
    """

    kind: str
    low: Optional[float] = None
    high: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise InvalidArgument(f"unknown transformation {self.kind!r}; expected one of {TRANSFORM_KINDS}")
        lo, hi = self.range
        if lo > hi:
            raise InvalidArgument(f"empty parameter range [{lo}, {hi}]")
        if self.kind in ("gaussian_noise", "outliers") and lo < 0:
            raise InvalidArgument(f"{self.kind} parameter must be non-negative")
        if self.kind == "outliers" and hi > 1:
            raise InvalidArgument("outlier fraction must be <= 1")

    @property
    def range(self) -> tuple[float, float]:
        lo, hi = DEFAULT_RANGES[self.kind]
        return (lo if self.low is None else float(self.low), hi if self.high is None else float(self.high))


def apply_transformation(cloud: PointCloud, spec: TransformSpec) -> PointCloud:
    """Apply the random transformation ``spec`` to ``cloud``.

    Rotation, stretch and shear act on the first two coordinates.
    """
    rng = make_rng(spec.seed)
    lo, hi = spec.range
    pts = np.array(cloud.points)
    n, d = pts.shape
    kind = spec.kind
    if kind == "translation":
        pts = pts + rng.uniform(lo, hi, size=d)
    elif kind == "rotation":
        if d < 2:
            raise InvalidArgument("rotation needs at least two dimensions")
        angle = math.radians(rng.uniform(lo, hi))
        c, s = math.cos(angle), math.sin(angle)
        xy = pts[:, :2].copy()
        # clockwise
        pts[:, 0] = c * xy[:, 0] + s * xy[:, 1]
        pts[:, 1] = -s * xy[:, 0] + c * xy[:, 1]
    elif kind == "stretch":
        pts[:, 0] *= rng.uniform(lo, hi)
    elif kind == "shear":
        if d < 2:
            raise InvalidArgument("shear needs at least two dimensions")
        # factor 1 turns a horizontal line into a 45 degree line
        pts[:, 1] += rng.uniform(lo, hi) * pts[:, 0]
    elif kind == "gaussian_noise":
        sigma = rng.uniform(lo, hi)
        if sigma > 0:
            pts = pts + rng.normal(0.0, sigma, size=pts.shape)
    elif kind == "outliers":
        m = int(math.floor(rng.uniform(lo, hi) * n))
        if m > 0:
            idx = rng.choice(n, size=m, replace=False)
            pts[idx] = rng.uniform(pts.min(axis=0), pts.max(axis=0), size=(m, d))
    return PointCloud(pts, label=cloud.label)
