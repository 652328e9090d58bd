import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pinw.errors import DegenerateError, ValidationError
from pinw.geom import (AffineMap2, Triangle, aspect_ratio, distortion_bounds, geodesic_distance, in_center,
                       in_circle, min_altitude, orient2d, triangle_angles, vertex_move_affine)

RIGHT12 = [(0.0, 0.0), (2.0, 0.0), (0.0, 1.0)]
EQUI = [(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)]

coord = st.floats(-100, 100, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord)


def _law_of_cosines(t):
    a, b, c = Triangle.make(*t).side_lengths()
    A = math.acos((b * b + c * c - a * a) / (2 * b * c))
    B = math.acos((a * a + c * c - b * b) / (2 * a * c))
    return [A, B, math.pi - A - B]


class TestAngles:
    def test_right_12(self):
        got = sorted(a for a, _ in triangle_angles(RIGHT12))
        assert got == pytest.approx(sorted([math.atan(0.5), math.atan(2), math.pi / 2]), abs=1e-14)

    def test_equilateral(self):
        assert [a for a, _ in triangle_angles(EQUI)] == pytest.approx([math.pi / 3] * 3, abs=1e-14)

    def test_random_against_law_of_cosines(self):
        rng = np.random.default_rng(0)
        for _ in range(500):
            t = Triangle.make(*map(tuple, rng.normal(size=(3, 2))))
            if aspect_ratio(t) > 1e4:
                continue
            got = [a for a, _ in triangle_angles(t)]
            assert abs(sum(got) - math.pi) < 1e-12
            assert got == pytest.approx(_law_of_cosines(t), abs=1e-9)

    def test_degenerate(self):
        with pytest.raises(DegenerateError):
            triangle_angles([(0, 0), (1, 1), (2, 2)])


class TestAltitudeAspect:
    def test_examples(self):
        assert min_altitude(RIGHT12) == pytest.approx(2 / math.sqrt(5), rel=1e-15)
        assert min_altitude(EQUI) == pytest.approx(math.sqrt(3) / 2, rel=1e-15)
        assert aspect_ratio(EQUI) == pytest.approx(4 / math.sqrt(3), rel=1e-14)
        assert aspect_ratio(RIGHT12) == pytest.approx(5.0, rel=1e-15)

    def test_nested_monotone(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            outer = rng.normal(size=(3, 2))
            w = rng.dirichlet(np.ones(3), size=3)
            inner = w @ outer
            try:
                assert min_altitude(inner) <= min_altitude(outer) * (1 + 1e-12)
            except DegenerateError:
                pass

    def test_aspect_matches_altitude_form(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            t = Triangle.make(*map(tuple, rng.normal(size=(3, 2))))
            assert aspect_ratio(t) == pytest.approx(2 * t.longest_side() / min_altitude(t), rel=1e-10)

    def test_aspect_vs_min_angle_constants(self):
        # empirical c1, c2 in c1*aspect <= 1/min_angle <= c2*aspect
        rng = np.random.default_rng(3)
        P = rng.normal(size=(100_000, 3, 2))
        sides = np.stack([np.hypot(*(P[:, (i + 1) % 3] - P[:, (i + 2) % 3]).T) for i in range(3)], axis=1)
        u, v = P[:, 1] - P[:, 0], P[:, 2] - P[:, 0]
        area = 0.5 * np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
        ok = area > 1e-9
        a, b, c = sides[ok].T
        A = np.arccos(np.clip((b * b + c * c - a * a) / (2 * b * c), -1, 1))
        B = np.arccos(np.clip((a * a + c * c - b * b) / (2 * a * c), -1, 1))
        mins = np.minimum(np.minimum(A, B), np.pi - A - B)
        asp = sides[ok].max(axis=1) ** 2 / area[ok]
        ratio = (1 / mins) / asp
        assert ratio.min() >= 0.05 and ratio.max() <= 4
        # observed range, kept in the decisions ledger: about [0.25, 0.5]
        assert 0.2 < ratio.min() and ratio.max() < 0.6


class TestInCenter:
    def test_equilateral(self):
        t = [(1, 0), (-0.5, math.sqrt(3) / 2), (-0.5, -math.sqrt(3) / 2)]
        assert in_center(t) == pytest.approx((0, 0), abs=1e-15)

    def test_345(self):
        assert in_center([(0, 0), (3, 0), (0, 4)]) == pytest.approx((1, 1), abs=1e-15)

    def test_equidistant(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            t = Triangle.make(*map(tuple, rng.normal(size=(3, 2))))
            p = in_center(t)
            d = []
            for i in range(3):
                a, b = t[i], t[(i + 1) % 3]
                d.append(abs((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) / math.dist(a, b))
            assert max(d) - min(d) < 1e-12 * max(1.0, max(d))
            assert all(orient2d(t[i], t[(i + 1) % 3], p) > 0 for i in range(3))


class TestAffine:
    def test_identity_move(self):
        m = vertex_move_affine(RIGHT12, 1, RIGHT12[1])
        assert np.allclose(m.linear, [[1, 0], [0, 1]], atol=1e-15)
        assert np.allclose(m.translation, [0, 0], atol=1e-15)

    def test_fixes_and_moves(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            t = [tuple(p) for p in rng.normal(size=(3, 2))]
            i = int(rng.integers(3))
            target = tuple(np.array(t[i]) + rng.normal(scale=0.05, size=2))
            try:
                m = vertex_move_affine(t, i, target)
            except DegenerateError:
                continue
            assert m(t[i]) == pytest.approx(target, abs=1e-9)
            for j in range(3):
                if j != i:
                    assert m(t[j]) == pytest.approx(t[j], abs=1e-9)

    def test_apex_move_stretch_bound(self):
        t = [(0.0, 1.0), (0.0, 0.0), (1.0, 0.0)]  # apex over the leg, altitude 1
        m = vertex_move_affine(t, 0, (0.1, 1.0))
        lo, hi = distortion_bounds(m)
        assert 0.9 <= lo <= hi <= 1.1

    def test_segment_ratios(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            t = Triangle.make(*map(tuple, rng.normal(size=(3, 2))))
            if aspect_ratio(t) > 50:
                continue
            i = int(rng.integers(3))
            j, k = (i + 1) % 3, (i + 2) % 3
            # altitude from the moving vertex
            base = math.dist(t[j], t[k])
            alt = 2 * t.area / base
            d = 0.3 * alt
            ang = rng.uniform(0, 2 * math.pi)
            target = (t[i][0] + d * math.cos(ang), t[i][1] + d * math.sin(ang))
            m = vertex_move_affine(t, i, target)
            p = rng.normal(size=(1000, 2))
            q = rng.normal(size=(1000, 2))
            for a, b in zip(p, q):
                r = math.dist(m(a), m(b)) / math.dist(a, b)
                assert 1 - d / alt - 1e-12 <= r <= 1 + d / alt + 1e-12

    def test_collapse_to_segment(self):
        with pytest.raises(DegenerateError) as exc:
            vertex_move_affine(RIGHT12, 2, (1.0, 0.0))
        assert exc.value.code == "collapse_to_segment"


class TestDistortion:
    def test_examples(self):
        assert distortion_bounds(AffineMap2.identity()) == (1.0, 1.0)
        assert distortion_bounds(((2.0, 0.0), (0.0, 0.5))) == pytest.approx((0.5, 2.0))

    def test_random_vs_eigen(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            M = rng.normal(size=(2, 2))
            ev = np.sqrt(np.sort(np.linalg.eigvalsh(M.T @ M)))
            lo, hi = distortion_bounds(tuple(map(tuple, M)))
            assert lo <= hi
            assert (lo, hi) == pytest.approx(tuple(ev), abs=1e-10)


class TestPredicates:
    def test_collinear(self):
        assert orient2d((0, 0), (1, 1), (3, 3)) == 0
        assert orient2d((0.1, 0.1), (0.2, 0.2), (0.3, 0.3)) == _exact_orient((0.1, 0.1), (0.2, 0.2), (0.3, 0.3))

    def test_cocircular(self):
        assert in_circle((0, 0), (1, 0), (0, 1), (1, 1)) == 0
        assert in_circle((0, 0), (1, 0), (0, 1), (0.5, 0.5)) == 1
        assert in_circle((0, 0), (1, 0), (0, 1), (2, 2)) == -1

    def test_near_degenerate_against_rationals(self):
        rng = np.random.default_rng(8)
        for _ in range(2000):
            p, q = rng.normal(size=(2, 2))
            s = rng.uniform(-2, 3)
            r = p + s * (q - p) + rng.normal(scale=1e-15, size=2) * rng.integers(0, 2)
            assert orient2d(p, q, r) == _exact_orient(p, q, r)
        for _ in range(2000):
            c = rng.normal(size=2)
            R = rng.uniform(0.5, 2)
            th = rng.uniform(0, 2 * math.pi, size=4)
            pts = [tuple(c + R * np.array([math.cos(t), math.sin(t)])) for t in th]
            p, q, r, s = pts
            if orient2d(p, q, r) <= 0:
                q, r = r, q
            assert in_circle(p, q, r, s) == _exact_incircle(p, q, r, s)

    @settings(max_examples=300, deadline=None)
    @given(point, point, point)
    def test_orient_antisymmetric(self, p, q, r):
        assert orient2d(p, q, r) == -orient2d(q, p, r) == orient2d(q, r, p)

    @settings(max_examples=300, deadline=None)
    @given(point, point, point, point)
    def test_incircle_matches_exact(self, p, q, r, s):
        assert in_circle(p, q, r, s) == _exact_incircle(p, q, r, s)


def _exact_orient(p, q, r):
    f = [Fraction(float(x)) for x in (*p, *q, *r)]
    d = (f[2] - f[0]) * (f[5] - f[1]) - (f[3] - f[1]) * (f[4] - f[0])
    return (d > 0) - (d < 0)


def _exact_incircle(p, q, r, s):
    rows = []
    for v in (p, q, r, s):
        x, y = Fraction(float(v[0])), Fraction(float(v[1]))
        rows.append([x, y, x * x + y * y, Fraction(1)])
    # 4x4 determinant by cofactor expansion
    def det(m):
        if len(m) == 1:
            return m[0][0]
        return sum((-1) ** j * m[0][j] * det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(len(m)))
    d = det(rows)
    return (d > 0) - (d < 0)


L_SHAPE = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]


def _grid_geodesic(p, q, res=20, reach=6):
    """Dense-grid shortest path in the L shape with a wide stencil."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import dijkstra
    xs = np.arange(2 * res + 1) / res
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    inside = ~((X > 1) & (Y > 1))
    ids = -np.ones(X.shape, dtype=int)
    ids[inside] = np.arange(inside.sum())
    steps = [(dx, dy) for dx in range(-reach, reach + 1) for dy in range(-reach, reach + 1)
             if (dx or dy) and math.gcd(abs(dx), abs(dy)) == 1]
    rows, cols, w = [], [], []
    I, J = np.nonzero(inside)
    n = 2 * res + 1
    for dx, dy in steps:
        I2, J2 = I + dx, J + dy
        ok = (I2 >= 0) & (I2 < n) & (J2 >= 0) & (J2 < n)
        I1, J1, I2, J2 = I[ok], J[ok], I2[ok], J2[ok]
        ok2 = inside[I2, J2]
        I1, J1, I2, J2 = I1[ok2], J1[ok2], I2[ok2], J2[ok2]
        # reject steps passing through the open notch (1, 2) x (1, 2)
        ts = np.linspace(0, 1, 33)[1:-1]
        bad = np.zeros(len(I1), dtype=bool)
        for t in ts:
            x = (I1 + t * (I2 - I1)) / res
            y = (J1 + t * (J2 - J1)) / res
            bad |= (x > 1 + 1e-12) & (y > 1 + 1e-12)
        keep = ~bad
        rows.append(ids[I1[keep], J1[keep]])
        cols.append(ids[I2[keep], J2[keep]])
        w.append(np.hypot(dx, dy) / res * np.ones(keep.sum()))
    n_nodes = inside.sum()
    g = coo_matrix((np.concatenate(w), (np.concatenate(rows), np.concatenate(cols))), shape=(n_nodes, n_nodes))
    src = ids[round(p[0] * res), round(p[1] * res)]
    dst = ids[round(q[0] * res), round(q[1] * res)]
    return dijkstra(g.tocsr(), indices=src)[dst]


class TestGeodesic:
    def test_convex(self):
        rect = [(0, 0), (2, 0), (2, 1), (0, 1)]
        assert geodesic_distance(rect, (0.1, 0.2), (1.9, 0.8)) == pytest.approx(math.dist((0.1, 0.2), (1.9, 0.8)))

    def test_same_point(self):
        assert geodesic_distance(L_SHAPE, (0.5, 0.5), (0.5, 0.5)) == 0.0

    def test_l_shape_bends_at_reflex_vertex(self):
        p, q = (0.2, 1.8), (1.8, 0.6)
        exact = math.dist(p, (1, 1)) + math.dist((1, 1), q)
        got = geodesic_distance(L_SHAPE, p, q)
        assert got == pytest.approx(exact, rel=1e-12)
        assert abs(_grid_geodesic(p, q) - got) < 1e-3

    def test_outside(self):
        with pytest.raises(ValidationError) as exc:
            geodesic_distance(L_SHAPE, (1.5, 1.5), (0, 0))
        assert exc.value.code == "outside_domain"
