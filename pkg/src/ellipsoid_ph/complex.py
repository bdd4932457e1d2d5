"""Filtered flag complexes (ellipsoid and Rips) built from a point cloud."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .exceptions import InvalidArgument, InvalidComplex, NumericalError
from .geometry import DEFAULT_CONFIG, SolverConfig, intersection_radii, intersection_radius
from .pointcloud import PointCloud, as_point_cloud
from .tangent import Ellipsoid, stack_ellipsoids

Edge = tuple  # (i, j, value) with i < j


@dataclass
class FilteredComplex:
    """Simplices (sorted vertex tuples) mapped to filtration values."""

    simplices: dict
    dmax: int
    n_vertices: int
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.simplices)

    def __contains__(self, simplex):
        return tuple(simplex) in self.simplices

    def value(self, simplex) -> float:
        return self.simplices[tuple(simplex)]

    def of_dimension(self, p: int) -> dict:
        return {s: v for s, v in self.simplices.items() if len(s) == p + 1}

    def count(self, p: int) -> int:
        return sum(1 for s in self.simplices if len(s) == p + 1)

    def validate(self, flag: bool = True) -> None:
        """Check closure, monotonicity and (optionally) the flag property."""
        simp = self.simplices
        for s, v in simp.items():
            if len(s) == 1:
                if v != 0:
                    raise InvalidComplex(f"vertex {s} has value {v}, expected 0")
                continue
            if list(s) != sorted(set(s)):
                raise InvalidComplex(f"simplex {s} is not a sorted vertex tuple")
            for face in combinations(s, len(s) - 1):
                fv = simp.get(face)
                if fv is None:
                    raise InvalidComplex(f"face {face} of {s} missing")
                if fv > v:
                    raise InvalidComplex(f"face {face} ({fv}) enters after coface {s} ({v})")
            if flag and len(s) > 2:
                emax = max(simp[e] for e in combinations(s, 2))
                if emax != v:
                    raise InvalidComplex(f"{s} has value {v}, but its longest edge enters at {emax}")
        if sum(1 for s in simp if len(s) == 1) != self.n_vertices:
            raise InvalidComplex("vertex count mismatch")

    def dump(self, path, header: Sequence[str] = ()) -> None:
        """Write one simplex per line as ``v0 v1 ... vk<TAB>value``."""
        order = sorted(self.simplices.items(), key=lambda kv: (kv[1], len(kv[0]), kv[0]))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in header:
                fh.write(f"# {line}\n")
            for s, v in order:
                fh.write(" ".join(map(str, s)) + "\t" + format(v, ".12g") + "\n")


def default_rmax(cloud, q: float = 1.0) -> float:
    """Half the diameter, times ``max(1, q)`` and a 5% margin."""
    cloud = as_point_cloud(cloud)
    return 0.5 * cloud.diameter() * max(1.0, q) * 1.05


def _candidate_pairs(points, radius):
    n = len(points)
    if not np.isfinite(radius):
        i, j = np.triu_indices(n, k=1)
        return np.column_stack([i, j])
    if points.shape[1] <= 16 and n > 64:
        pairs = cKDTree(points).query_pairs(radius, output_type="ndarray")
        if len(pairs) == 0:
            return np.zeros((0, 2), dtype=int)
        pairs = np.sort(pairs, axis=1)
        return pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    i, j = np.triu_indices(n, k=1)
    dist = pdist(points) if n > 1 else np.zeros(0)
    keep = dist <= radius
    return np.column_stack([i[keep], j[keep]])


def _sorted_edges(i, j, values) -> list:
    order = np.lexsort((j, i, values))
    return [(int(i[k]), int(j[k]), float(values[k])) for k in order]


def build_rips_edges(cloud, rmax: float) -> list:
    """Edges with value half the distance between their endpoints, up to ``rmax``."""
    cloud = as_point_cloud(cloud)
    if not rmax > 0:
        raise InvalidArgument(f"rmax must be positive, got {rmax}")
    pts = cloud.points
    pairs = _candidate_pairs(pts, 2.0 * rmax * (1 + 1e-12))
    if len(pairs) == 0:
        return []
    vals = np.linalg.norm(pts[pairs[:, 1]] - pts[pairs[:, 0]], axis=1) / 2.0
    keep = vals <= rmax
    return _sorted_edges(pairs[keep, 0], pairs[keep, 1], vals[keep])


def build_ellipsoid_edges(cloud, ellipsoids: Sequence[Ellipsoid], rmax: float,
                          cfg: SolverConfig = DEFAULT_CONFIG, n_jobs: Optional[int] = None) -> list:
    """Edges valued at the scale where the two endpoint ellipsoids first touch.

    Pairs farther apart than ``2 * rmax`` are skipped outright, since the
    touching scale is never below half the distance.
    """
    cloud = as_point_cloud(cloud)
    if len(ellipsoids) != cloud.n:
        raise InvalidArgument(f"{len(ellipsoids)} ellipsoids for {cloud.n} points")
    if not rmax > 0:
        raise InvalidArgument(f"rmax must be positive, got {rmax}")
    pts = cloud.points
    pairs = _candidate_pairs(pts, 2.0 * rmax * (1 + 1e-12))
    if len(pairs) == 0:
        return []
    centers, axes, ratios = stack_ellipsoids(ellipsoids)
    a, b = pairs[:, 0], pairs[:, 1]
    try:
        vals = intersection_radii(centers[a], axes[a], ratios[a], centers[b], axes[b], ratios[b], cfg, n_jobs=n_jobs)
    except NumericalError:
        for i, j in pairs:
            try:
                intersection_radius(ellipsoids[i], ellipsoids[j], cfg)
            except NumericalError as exc:
                raise NumericalError(f"pair ({i}, {j}): {exc}") from None
        raise
    keep = vals <= rmax
    return _sorted_edges(a[keep], b[keep], vals[keep])


def nesting_violations(cloud, ellipsoids: Sequence[Ellipsoid], edges: Iterable, tol: float = 1e-6) -> list:
    """Edges whose value leaves ``[D/2 - tol, D/(2 r_min) + tol]``.

    ``D`` is the endpoint distance and ``r_min`` the smaller of the two
    ellipsoids' shortest axis ratios; returns ``(i, j, value, low, high)``.
    """
    pts = as_point_cloud(cloud).points
    out = []
    for i, j, val in edges:
        D = float(np.linalg.norm(pts[j] - pts[i]))
        r_min = min(float(ellipsoids[i].ratios.min()), float(ellipsoids[j].ratios.min()))
        lo, hi = D / 2.0, D / (2.0 * r_min)
        if not lo - tol <= val <= hi + tol:
            out.append((int(i), int(j), float(val), lo, hi))
    return out


def expand_flag(n_vertices: int, edges: Iterable, dmax: int) -> FilteredComplex:
    """Flag complex of the edge graph up to dimension ``dmax``.

    Each clique enters at the largest value among its edges.
    """
    if dmax < 1:
        raise InvalidArgument(f"dmax must be >= 1, got {dmax}")
    simplices = {(v,): 0.0 for v in range(n_vertices)}
    # upper[u][w] = value of edge (u, w) for w > u
    upper: list[dict] = [dict() for _ in range(n_vertices)]
    for i, j, val in edges:
        i, j = int(i), int(j)
        if i == j or not (0 <= i < n_vertices and 0 <= j < n_vertices):
            raise InvalidArgument(f"invalid edge ({i}, {j})")
        if i > j:
            i, j = j, i
        if j in upper[i]:
            raise InvalidArgument(f"duplicate edge ({i}, {j})")
        upper[i][j] = float(val)
        simplices[(i, j)] = float(val)

    if dmax >= 2:
        def extend(simplex, value, common):
            for w in sorted(common):
                val = value
                for u in simplex:
                    e = upper[u][w]
                    if e > val:
                        val = e
                s = simplex + (w,)
                simplices[s] = val
                if len(s) <= dmax:
                    extend(s, val, common.intersection(upper[w]))

        for u in range(n_vertices):
            nbrs = upper[u]
            for w in sorted(nbrs):
                common = nbrs.keys() & upper[w].keys()
                if common:
                    extend((u, w), nbrs[w], common)
    return FilteredComplex(simplices, dmax, n_vertices)


def ellipsoid_complex(cloud, ellipsoids, rmax, dmax=2, cfg=DEFAULT_CONFIG, n_jobs=None) -> FilteredComplex:
    cloud = as_point_cloud(cloud)
    edges = build_ellipsoid_edges(cloud, ellipsoids, rmax, cfg, n_jobs=n_jobs)
    cx = expand_flag(cloud.n, edges, dmax)
    cx.meta.update(kind="ellipsoid", rmax=rmax)
    return cx


def rips_complex(cloud, rmax, dmax=2) -> FilteredComplex:
    cloud = as_point_cloud(cloud)
    cx = expand_flag(cloud.n, build_rips_edges(cloud, rmax), dmax)
    cx.meta.update(kind="rips", rmax=rmax)
    return cx
