import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipsoid_ph.complex import (
    FilteredComplex,
    build_ellipsoid_edges,
    build_rips_edges,
    default_rmax,
    ellipsoid_complex,
    expand_flag,
    nesting_violations,
    rips_complex,
)
from ellipsoid_ph.exceptions import InvalidArgument, InvalidComplex
from ellipsoid_ph.pointcloud import PointCloud
from ellipsoid_ph.tangent import RatioSpec, construct_ellipsoids

from oracles import brute_force_cliques


class TestRipsEdges:
    def test_two_points(self):
        assert build_rips_edges(PointCloud([[0.0, 0.0], [2.0, 0.0]]), 5.0) == [(0, 1, 1.0)]

    def test_unit_square(self):
        edges = build_rips_edges(PointCloud([[0, 0], [1, 0], [1, 1], [0, 1]]), 10.0)
        vals = sorted(v for _, _, v in edges)
        assert vals[:4] == [0.5] * 4
        assert vals[4:] == pytest.approx([math.sqrt(2) / 2] * 2)

    def test_duplicates(self):
        assert build_rips_edges(PointCloud([[1.0, 1.0], [1.0, 1.0]]), 1.0) == [(0, 1, 0.0)]

    def test_rmax_cut(self):
        edges = build_rips_edges(PointCloud([[0.0], [1.0], [3.0]]), 1.0)
        assert [(i, j) for i, j, _ in edges] == [(0, 1), (1, 2)]

    def test_tree_path_matches_dense(self, nprng):
        pts = nprng.uniform(size=(200, 2))
        edges = build_rips_edges(PointCloud(pts), 0.1)
        expected = {(i, j) for i in range(200) for j in range(i + 1, 200)
                    if np.linalg.norm(pts[i] - pts[j]) / 2 <= 0.1}
        assert {(i, j) for i, j, _ in edges} == expected

    def test_bad_rmax(self):
        with pytest.raises(InvalidArgument):
            build_rips_edges(PointCloud([[0.0]]), 0.0)


class TestEllipsoidEdges:
    def test_q1_matches_half_distance(self, nprng):
        cloud = PointCloud(nprng.normal(size=(25, 3)))
        ells = construct_ellipsoids(cloud, 5, RatioSpec(q=1))
        e = build_ellipsoid_edges(cloud, ells, 1.5)
        r = build_rips_edges(cloud, 1.5)
        assert [(i, j) for i, j, _ in e] == [(i, j) for i, j, _ in r]
        np.testing.assert_allclose([v for *_, v in e], [v for *_, v in r], rtol=1e-9)

    @pytest.mark.parametrize("q", [1.0, 3.0, 7.0])
    def test_two_points(self, q):
        cloud = PointCloud([[0.0, 0.0], [1.0, 0.5]])
        ells = construct_ellipsoids(cloud, 1, RatioSpec(q=q))
        assert len(build_ellipsoid_edges(cloud, ells, 100.0)) == 1

    def test_count_mismatch(self, nprng):
        cloud = PointCloud(nprng.normal(size=(5, 2)))
        ells = construct_ellipsoids(cloud, 2)
        with pytest.raises(InvalidArgument):
            build_ellipsoid_edges(cloud, ells[:4], 1.0)

    @pytest.mark.parametrize("q", [2.0, 3.0, 5.0])
    def test_nesting(self, nprng, q):
        cloud = PointCloud(nprng.normal(size=(40, 2)))
        ells = construct_ellipsoids(cloud, 5, RatioSpec(q=q))
        edges = build_ellipsoid_edges(cloud, ells, np.inf)
        assert len(edges) == 40 * 39 // 2
        assert nesting_violations(cloud, ells, edges) == []

    def test_violation_reported(self, nprng):
        cloud = PointCloud(nprng.normal(size=(6, 2)))
        ells = construct_ellipsoids(cloud, 2, RatioSpec(q=2))
        edges = build_ellipsoid_edges(cloud, ells, np.inf)
        i, j, v = edges[3]
        edges[3] = (i, j, 100.0 * v + 10.0)
        bad = nesting_violations(cloud, ells, edges)
        assert [(b[0], b[1]) for b in bad] == [(i, j)]


class TestExpandFlag:
    def test_triangle_max_rule(self):
        cx = expand_flag(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)], 2)
        assert cx.value((0, 1, 2)) == 3.0
        cx.validate()

    def test_path_has_no_triangles(self):
        cx = expand_flag(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], 2)
        assert cx.count(2) == 0 and cx.count(1) == 3 and cx.count(0) == 4

    def test_duplicate_edge(self):
        with pytest.raises(InvalidArgument):
            expand_flag(3, [(0, 1, 1.0), (1, 0, 2.0)], 2)

    def test_self_loop(self):
        with pytest.raises(InvalidArgument):
            expand_flag(3, [(1, 1, 1.0)], 2)

    def test_dmax_one(self):
        cx = expand_flag(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], 1)
        assert cx.count(2) == 0

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 8), st.integers(1, 4), st.floats(0.1, 0.9))
    def test_matches_brute_force_cliques(self, seed, n, dmax, density):
        rng = random.Random(seed)
        edges = [(i, j, float(rng.randint(0, 5))) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < density]
        assert expand_flag(n, edges, dmax).simplices == brute_force_cliques(n, edges, dmax)

    def test_random_eight_vertex(self, pyrng):
        for _ in range(20):
            edges = [(i, j, pyrng.random()) for i in range(8) for j in range(i + 1, 8) if pyrng.random() < 0.7]
            cx = expand_flag(8, edges, 3)
            assert cx.simplices == brute_force_cliques(8, edges, 3)
            cx.validate()


class TestFilteredComplex:
    def test_validate_catches_missing_face(self):
        cx = FilteredComplex({(0,): 0.0, (1,): 0.0, (0, 1, 2): 1.0}, 2, 2)
        with pytest.raises(InvalidComplex):
            cx.validate()

    def test_validate_catches_order(self):
        cx = FilteredComplex({(0,): 0.0, (1,): 0.0, (2,): 0.0, (0, 1): 2.0, (1, 2): 1.0, (0, 2): 1.0,
                              (0, 1, 2): 1.0}, 2, 3)
        with pytest.raises(InvalidComplex):
            cx.validate(flag=False)

    def test_dump(self, tmp_path):
        cx = expand_flag(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)], 2)
        cx.dump(tmp_path / "c.txt", header=["kind=test"])
        lines = (tmp_path / "c.txt").read_text().splitlines()
        assert lines[0] == "# kind=test"
        assert lines[1:] == ["0\t0", "1\t0", "2\t0", "0 1\t1", "1 2\t2", "0 2\t3", "0 1 2\t3"]


def test_complex_builders_set_meta(nprng):
    cloud = PointCloud(nprng.normal(size=(10, 2)))
    assert rips_complex(cloud, 1.0).meta == {"kind": "rips", "rmax": 1.0}
    ells = construct_ellipsoids(cloud, 3, RatioSpec(q=2))
    cx = ellipsoid_complex(cloud, ells, 2.0, dmax=2)
    assert cx.meta["kind"] == "ellipsoid"
    cx.validate()


def test_default_rmax():
    cloud = PointCloud([[0.0, 0.0], [2.0, 0.0]])
    assert default_rmax(cloud) == pytest.approx(1.05)
    assert default_rmax(cloud, 3.0) == pytest.approx(3.15)
