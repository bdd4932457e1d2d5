"""Independent reference computations used by the tests.

None of these call the production routines they are compared against.
"""

import itertools

import numpy as np

from ellipsoid_ph.complex import FilteredComplex, expand_flag


def brute_force_cliques(n_vertices, edges, dmax):
    """Every vertex subset of size <= dmax + 1 whose pairs are all edges."""
    value = {(min(i, j), max(i, j)): v for i, j, v in edges}
    out = {(v,): 0.0 for v in range(n_vertices)}
    for size in range(2, dmax + 2):
        for s in itertools.combinations(range(n_vertices), size):
            pairs = list(itertools.combinations(s, 2))
            if all(p in value for p in pairs):
                out[s] = max(value[p] for p in pairs)
    return out


def random_flag_complex(rng, max_vertices=8, dmax=3, levels=6):
    n = rng.randint(1, max_vertices)
    edges = []
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < 0.6:
            # few distinct values so that ties are common
            edges.append((i, j, float(rng.randint(1, levels))))
    return expand_flag(n, edges, rng.randint(1, dmax))


def random_general_complex(rng, max_vertices=8, dmax=3):
    """Downward-closed random complex with monotone, not necessarily flag, values."""
    n = rng.randint(1, max_vertices)
    d = rng.randint(1, dmax)
    simplices = {(v,): 0.0 for v in range(n)}
    for size in range(2, d + 2):
        for s in itertools.combinations(range(n), size):
            faces = list(itertools.combinations(s, size - 1))
            if all(f in simplices for f in faces) and rng.random() < 0.55:
                simplices[s] = max(simplices[f] for f in faces) + float(rng.randint(0, 2))
    return FilteredComplex(simplices, d, n)


def random_ellipsoid_pair(rng, d, q_max=5.0):
    """Centres, orthonormal axes and ratios for two random ellipsoids."""
    out = []
    for _ in range(2):
        P, _ = np.linalg.qr(rng.normal(size=(d, d)))
        r = np.sort(rng.uniform(1.0 / q_max, 1.0, d))[::-1]
        r[0] = 1.0
        out.append((rng.normal(size=d), P, r))
    return out


def sample_in_ellipsoid(rng, center, axes, ratios, eps, m):
    """Uniform samples inside ``{c + eps * P diag(r) u : |u| <= 1}``."""
    d = len(center)
    u = rng.normal(size=(m, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    u *= rng.uniform(size=(m, 1)) ** (1.0 / d)
    return center + (u * (eps * ratios)) @ axes.T


def monte_carlo_intersect(rng, e1, e2, eps, m=100_000):
    """True if any of ``m`` uniform samples of E1 lies in E2 (all at scale eps)."""
    x = sample_in_ellipsoid(rng, *e1, eps, m)
    c2, P2, r2 = e2
    y = (x - c2) @ P2 / (eps * r2)
    return bool(np.any(np.einsum("ij,ij->i", y, y) <= 1.0))


def _batched_min_k(c1, P1, r1, c2, P2, r2, eps, iters=80):
    """min over lambda of K, straight from its definition with dense solves."""
    v = c2 - c1
    Ainv = np.einsum("mij,mj,mkj->mik", P1, (eps[:, None] * r1) ** 2, P1)
    Binv = np.einsum("mij,mj,mkj->mik", P2, (eps[:, None] * r2) ** 2, P2)

    def K(lam):
        M = Binv / (1 - lam)[:, None, None] + Ainv / lam[:, None, None]
        w = np.linalg.solve(M, v[..., None])[..., 0]
        return 1.0 - np.einsum("mi,mi->m", v, w)

    # ternary search on the convex function K
    lo = np.full(len(v), 1e-12)
    hi = np.full(len(v), 1 - 1e-12)
    for _ in range(iters):
        a = lo + (hi - lo) / 3
        b = hi - (hi - lo) / 3
        left = K(a) <= K(b)
        hi = np.where(left, b, hi)
        lo = np.where(left, lo, a)
    return K((lo + hi) / 2)


def bisection_radius(c1, P1, r1, c2, P2, r2, rel_tol=1e-9):
    """Touching scale by bisecting the sign of min K over the nesting bracket."""
    D = np.linalg.norm(c2 - c1, axis=1)
    rmin = np.minimum(r1.min(axis=1), r2.min(axis=1))
    lo = D / 2 * (1 - 1e-9)
    hi = D / (2 * rmin) * (1 + 1e-9)
    while np.any(hi - lo > rel_tol * hi):
        mid = (lo + hi) / 2
        meets = _batched_min_k(c1, P1, r1, c2, P2, r2, mid) >= 0
        hi = np.where(meets, mid, hi)
        lo = np.where(meets, lo, mid)
    return (lo + hi) / 2


def naive_barcode(complex, max_dim):
    """Standard left-to-right reduction of the full boundary matrix, no clearing.

    Returns the sorted list of positive-length (dim, birth, death) intervals.
    """
    order = sorted(complex.simplices.items(), key=lambda kv: (kv[1], len(kv[0]), kv[0]))
    pos = {s: i for i, (s, _) in enumerate(order)}
    cols = []
    for s, _ in order:
        cols.append({pos[f] for f in itertools.combinations(s, len(s) - 1)} if len(s) > 1 else set())
    low_of = {}
    paired = set()
    bars = []
    for j in range(len(cols)):
        col = cols[j]
        while col and max(col) in low_of:
            col ^= cols[low_of[max(col)]]
        if col:
            i = max(col)
            low_of[i] = j
            paired.update((i, j))
            dim = len(order[i][0]) - 1
            if dim <= max_dim and order[j][1] > order[i][1]:
                bars.append((dim, order[i][1], order[j][1]))
    for i, (s, v) in enumerate(order):
        if i not in paired and len(s) - 1 <= max_dim:
            bars.append((len(s) - 1, v, float("inf")))
    return sorted(bars)
