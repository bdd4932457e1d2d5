"""Persistence barcodes over GF(2) by boundary-matrix column reduction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from .complex import FilteredComplex
from .exceptions import InvalidArgument, InvalidComplex, ParseError

INF = math.inf


@dataclass(frozen=True)
class Barcode:
    """Persistence intervals ``(dim, birth, death)``; ``death`` may be ``inf``.

    ``rmax`` is the filtration cap of the complex the barcode came from.
    """

    intervals: tuple = ()
    rmax: float = field(default=INF, compare=False)

    def __post_init__(self):
        clean = []
        for dim, birth, death in self.intervals:
            birth, death = float(birth), float(death)
            if not birth <= death:
                raise InvalidComplex(f"interval with birth {birth} > death {death}")
            clean.append((int(dim), birth, death))
        clean.sort()
        object.__setattr__(self, "intervals", tuple(clean))

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    @property
    def degrees(self) -> list:
        return sorted({iv[0] for iv in self.intervals})

    def in_degree(self, dim: int) -> np.ndarray:
        """``(m, 2)`` array of (birth, death) pairs in homology degree ``dim``."""
        rows = [(b, d) for p, b, d in self.intervals if p == dim]
        return np.array(rows, dtype=float).reshape(-1, 2)

    def lifespans(self, dim: int, cap: float = INF) -> np.ndarray:
        """Interval lengths in degree ``dim``, longest first; infinite deaths become ``cap``."""
        bd = self.in_degree(dim)
        if not len(bd):
            return np.zeros(0)
        death = np.where(np.isinf(bd[:, 1]), cap, bd[:, 1])
        return np.sort(death - bd[:, 0])[::-1]

    def betti_at(self, eps: float, dim: int) -> int:
        """Number of intervals in degree ``dim`` alive at ``eps`` (birth <= eps < death)."""
        return sum(1 for p, b, d in self.intervals if p == dim and b <= eps < d)

    def to_tsv(self, path, header: Sequence[str] = ()) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.format_tsv(header))

    def format_tsv(self, header: Sequence[str] = ()) -> str:
        lines = [f"# {h}" for h in header]
        lines.append("dim\tbirth\tdeath")
        for p, b, d in self.intervals:
            lines.append(f"{p}\t{_fmt(b)}\t{_fmt(d)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, path) -> "Barcode":
        with open(path, encoding="utf-8") as fh:
            return cls.parse_tsv(fh.read())

    @classmethod
    def parse_tsv(cls, text: str) -> "Barcode":
        rows = []
        seen_header = False
        rmax = INF
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                if key.strip() == "rmax":
                    try:
                        rmax = float(value)
                    except ValueError:
                        raise ParseError(f"bad rmax header {value!r}", row=lineno) from None
                continue
            if not line:
                continue
            fields = line.split("\t") if "\t" in line else line.split()
            if not seen_header:
                if [f.strip() for f in fields] != ["dim", "birth", "death"]:
                    raise ParseError("expected header 'dim\\tbirth\\tdeath'", row=lineno)
                seen_header = True
                continue
            if len(fields) != 3:
                raise ParseError(f"expected 3 fields, found {len(fields)}", row=lineno)
            try:
                dim = int(fields[0])
                birth = float(fields[1])
                death = float(fields[2])
            except ValueError:
                raise ParseError(f"malformed interval {line!r}", row=lineno) from None
            if dim < 0 or not math.isfinite(birth) or math.isnan(death) or death < birth:
                raise ParseError(f"invalid interval {line!r}", row=lineno)
            rows.append((dim, birth, death))
        if not seen_header:
            raise ParseError("missing header 'dim\\tbirth\\tdeath'")
        return cls(tuple(rows), rmax=rmax)


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else format(x, ".12g")


def sort_filtration(complex: FilteredComplex) -> list:
    """Simplices ordered by (value, dimension, vertex tuple), faces before cofaces."""
    simp = complex.simplices
    for s, v in simp.items():
        if len(s) > 1:
            for face in combinations(s, len(s) - 1):
                fv = simp.get(face)
                if fv is None:
                    raise InvalidComplex(f"face {face} of {s} missing")
                if fv > v:
                    raise InvalidComplex(f"face {face} ({fv}) enters after coface {s} ({v})")
    return sorted(simp.items(), key=lambda kv: (kv[1], len(kv[0]), kv[0]))


def compute_persistence(complex: FilteredComplex, max_dim: int = 1, method: str = "homology") -> Barcode:
    """Barcode in degrees ``0..max_dim``.

    ``method="cohomology"`` (default) reduces coboundary columns with clearing;
    ``"homology"`` reduces boundary columns from the top dimension down. Both
    give the same pairing for the (value, dimension, vertex tuple) order, but
    the cohomology route skips the many higher simplices that only create
    classes above ``max_dim``.
    """
    if method == "cohomology":
        return _persistence_cohomology(complex, max_dim)
    if method == "homology":
        return _persistence_homology(complex, max_dim)
    raise InvalidArgument(f"unknown persistence method {method!r}")


def _levels(complex: FilteredComplex, top: int):
    ordered = sort_filtration(complex)
    by_dim: list[list] = [[] for _ in range(top + 1)]
    for s, v in ordered:
        p = len(s) - 1
        if p <= top:
            by_dim[p].append((s, v))
    return by_dim


def _persistence_homology(complex: FilteredComplex, max_dim: int) -> Barcode:
    # Columns are Python ints used as GF(2) bit vectors over the face index.
    top = min(max_dim + 1, complex.dmax)
    by_dim = _levels(complex, top)
    index = [{s: i for i, (s, _) in enumerate(level)} for level in by_dim]

    intervals = []
    cleared: list[set] = [set() for _ in range(top + 2)]
    negative: list[set] = [set() for _ in range(top + 1)]
    # Only cycle-creating edges can be pivots of triangle columns. Once all of
    # them are, every later triangle column reduces to zero, which matters only
    # when degree 2 itself is reported.
    cycle_edges = _count_cycle_edges(by_dim) if top >= 2 and max_dim < 2 else -1
    for p in range(top, 0, -1):
        rows = index[p - 1]
        faces = by_dim[p - 1]
        pivots: dict = {}
        for j, (s, val) in enumerate(by_dim[p]):
            if p == 2 and len(pivots) == cycle_edges:
                break
            if j in cleared[p]:
                continue
            col = 0
            for face in combinations(s, p):
                col |= 1 << rows[face]
            while col:
                low = col.bit_length() - 1
                other = pivots.get(low)
                if other is None:
                    break
                col ^= other
            if col:
                pivots[low] = col
                cleared[p - 1].add(low)
                negative[p].add(j)
                birth = faces[low][1]
                if p - 1 <= max_dim and val > birth:
                    intervals.append((p - 1, birth, val))
    for p in range(min(max_dim, top) + 1):
        for j, (s, val) in enumerate(by_dim[p]):
            if j not in cleared[p] and j not in negative[p]:
                intervals.append((p, val, INF))
    return Barcode(tuple(intervals), rmax=complex.meta.get("rmax", INF))


def _count_cycle_edges(by_dim) -> int:
    """Edges that close a cycle when added in filtration order (union-find)."""
    parent = list(range(len(by_dim[0])))
    vid = {s[0]: i for i, (s, _) in enumerate(by_dim[0])}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = 0
    for (a, b), _ in by_dim[1]:
        ra, rb = find(vid[a]), find(vid[b])
        if ra == rb:
            count += 1
        else:
            parent[max(ra, rb)] = min(ra, rb)
    return count


def _persistence_cohomology(complex: FilteredComplex, max_dim: int) -> Barcode:
    # Coboundary columns of the p-simplices, taken in reverse filtration order.
    # A column's pivot is its earliest cofacet, i.e. its lowest set bit.
    top = min(max_dim + 1, complex.dmax)
    by_dim = _levels(complex, top)
    intervals = []
    cleared: set = set()  # indices of p-simplices that were pivots in degree p - 1
    for p in range(min(max_dim, top) + 1):
        level = by_dim[p]
        cofaces = by_dim[p + 1] if p + 1 <= top else []
        cob: list = [0] * len(level)
        if cofaces:
            row = {s: i for i, (s, _) in enumerate(level)}
            for t, (s, _) in enumerate(cofaces):
                bit = 1 << t
                for face in combinations(s, p + 1):
                    cob[row[face]] |= bit
        pivots: dict = {}
        next_cleared: set = set()
        for j in range(len(level) - 1, -1, -1):
            if j in cleared:
                continue
            col = cob[j]
            while col:
                low = (col & -col).bit_length() - 1
                other = pivots.get(low)
                if other is None:
                    break
                col ^= other
            birth = level[j][1]
            if col:
                pivots[low] = col
                next_cleared.add(low)
                death = cofaces[low][1]
                if death > birth:
                    intervals.append((p, birth, death))
            else:
                intervals.append((p, birth, INF))
        cleared = next_cleared
    return Barcode(tuple(intervals), rmax=complex.meta.get("rmax", INF))


def _gf2_rank(M: np.ndarray) -> int:
    """Rank over GF(2) of a dense 0/1 matrix by Gaussian elimination."""
    A = (np.asarray(M) % 2).astype(np.uint8)
    rank = 0
    n_rows, n_cols = A.shape
    for c in range(n_cols):
        if rank == n_rows:
            break
        hits = np.flatnonzero(A[rank:, c])
        if not hits.size:
            continue
        r = rank + hits[0]
        if r != rank:
            A[[rank, r]] = A[[r, rank]]
        below = np.flatnonzero(A[:, c])
        below = below[below != rank]
        A[below] ^= A[rank]
        rank += 1
    return rank


def boundary_matrix(faces: Sequence[tuple], cofaces: Sequence[tuple]) -> np.ndarray:
    """Dense GF(2) boundary matrix with rows ``faces`` and columns ``cofaces``."""
    row = {s: i for i, s in enumerate(faces)}
    D = np.zeros((len(faces), len(cofaces)), dtype=np.uint8)
    for j, s in enumerate(cofaces):
        for f in combinations(s, len(s) - 1):
            D[row[f], j] = 1
    return D


def betti_numbers_at(complex: FilteredComplex, eps: float, max_dim: int = 1) -> list:
    """Betti numbers of the sublevel complex at ``eps`` via dense GF(2) ranks.

    Independent of :func:`compute_persistence`; used to cross-check it.
    """
    levels = [[] for _ in range(max_dim + 2)]
    for s, v in complex.simplices.items():
        p = len(s) - 1
        if p <= max_dim + 1 and v <= eps:
            levels[p].append(s)
    ranks = [0] * (max_dim + 3)
    for p in range(1, max_dim + 2):
        if levels[p] and levels[p - 1]:
            ranks[p] = _gf2_rank(boundary_matrix(levels[p - 1], levels[p]))
    return [len(levels[p]) - ranks[p] - ranks[p + 1] for p in range(max_dim + 1)]
