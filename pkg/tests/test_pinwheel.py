import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pinw.errors import ValidationError
from pinw.geom import Triangle, dist, min_altitude, point_in_polygon
from pinw.pinwheel import (AngleClass, conjugate_angles, needs_tripartition, pinwheel_split,
                           rational_angle_guard, role_angles, root_class, tripartition)

from conftest import random_root_angles, triangle_from_angles

RIGHT12 = [(0.0, 0.0), (2.0, 0.0), (0.0, 1.0)]


def _angle_at(p, q, r):
    """Angle at p between rays pq and pr."""
    u = (q[0] - p[0], q[1] - p[1])
    v = (r[0] - p[0], r[1] - p[1])
    return math.atan2(abs(u[0] * v[1] - u[1] * v[0]), u[0] * v[0] + u[1] * v[1])


def _split_12():
    order, cls = root_class(RIGHT12)
    return pinwheel_split([RIGHT12[i] for i in order], cls)


class TestSplit:
    def test_right12_five_congruent(self):
        res = _split_12()
        parent = sorted(Triangle.make(*RIGHT12).side_lengths())
        for ch in res.children:
            sides = sorted(ch.triangle.side_lengths())
            assert sides == pytest.approx([s / math.sqrt(5) for s in parent], rel=1e-12)
            assert min_altitude(ch.vertices) == pytest.approx(0.4, rel=1e-12)

    def test_right_triangle_conjugate_similar(self):
        cls = AngleClass.of_root(0.3, math.pi / 2 - 0.3, math.pi / 2)
        a1, a2 = cls.angle_sets()
        assert a1 == pytest.approx(a2, abs=1e-15)

    def test_generic_child_sets(self):
        a, b, c = 0.5, 1.0, math.pi - 1.5
        res = pinwheel_split(triangle_from_angles(a, b, c), AngleClass.of_root(a, b, c))
        A1 = sorted([0.5, 1.0, math.pi - 1.5])
        A2 = sorted([0.5, math.pi - 2.0, 1.5])
        assert A1 == pytest.approx([0.5, 1.0, 1.6416], abs=1e-4)
        assert A2 == pytest.approx([0.5, 1.1416, 1.5], abs=1e-4)
        for ch in res.children:
            got = sorted(role_angles(ch.vertices))
            target = A2 if ch.role in ("II", "IV") else A1
            assert got == pytest.approx(target, abs=1e-9)
            assert list(role_angles(ch.vertices)) == pytest.approx(list(ch.cls.angles), abs=1e-9)

    def test_construction_angles_and_isosceles(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            a, b, c = random_root_angles(rng)
            tri = triangle_from_angles(a, b, c, rot=rng.uniform(0, 6.3), scale=rng.uniform(0.1, 10))
            res = pinwheel_split(tri, AngleClass.of_root(a, b, c))
            P = res.points
            assert _angle_at(P["C"], P["F"], P["B"]) == pytest.approx(a, abs=1e-9)
            assert _angle_at(P["F"], P["D"], P["C"]) == pytest.approx(b, abs=1e-9)
            assert _angle_at(P["D"], P["A"], P["E"]) == pytest.approx(b, abs=1e-9)
            assert _angle_at(P["D"], P["G"], P["C"]) == pytest.approx(a, abs=1e-9)
            assert dist(P["A"], P["D"]) == pytest.approx(dist(P["D"], P["F"]), rel=1e-10)
            assert res.hosts == {"D": "AC", "E": "AB", "F": "AB", "G": "CF"}
            assert res.hanging == ("G", "CF", "V")

    def test_needs_reorder(self):
        cls = AngleClass("root", (1.2, 0.9, math.pi - 2.1))
        with pytest.raises(ValidationError) as exc:
            pinwheel_split(triangle_from_angles(1.2, 0.9, math.pi - 2.1), cls)
        assert exc.value.code == "needs_reorder"

    def test_role_mismatch(self):
        cls = AngleClass.of_root(0.5, 1.0, math.pi - 1.5)
        with pytest.raises(ValidationError):
            pinwheel_split(triangle_from_angles(0.6, 1.0, math.pi - 1.6), cls)

    def test_partition(self):
        rng = np.random.default_rng(12)
        for _ in range(30):
            a, b, c = random_root_angles(rng)
            tri = triangle_from_angles(a, b, c)
            res = pinwheel_split(tri, AngleClass.of_root(a, b, c))
            area = sum(ch.triangle.area for ch in res.children)
            assert area == pytest.approx(Triangle.make(*tri).area, rel=1e-10)
            w = rng.dirichlet(np.ones(3), size=200)
            pts = w @ np.array(tri)
            for p in pts:
                hits = sum(point_in_polygon(tuple(p), ch.triangle) for ch in res.children)
                assert hits >= 1
                # interior points almost surely avoid child boundaries
                assert hits == 1


class TestConjugate:
    def test_example_and_involution(self):
        a, c = 0.3, 1.8
        b = math.pi - a - c
        out = conjugate_angles(a, b, c)
        assert out == pytest.approx((0.3, 1.5, math.pi - 1.8))
        cls = AngleClass.of_root(a, b, c)
        assert cls.conjugate().conjugate() == cls
        assert cls.conjugate().angles == pytest.approx(out)

    def test_right(self):
        a = 0.4
        assert sorted(conjugate_angles(a, math.pi / 2 - a, math.pi / 2)) == pytest.approx(
            sorted((a, math.pi / 2 - a, math.pi / 2)))

    def test_errors(self):
        with pytest.raises(ValidationError):
            conjugate_angles(1.2, 0.9, math.pi - 2.1)
        with pytest.raises(ValidationError):
            conjugate_angles(0.3, 1.0, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.01, 1.5), st.floats(0.01, 1.5))
    def test_sum_and_float_involution(self, a, b):
        c = math.pi - a - b
        if not a < c:
            return
        out = conjugate_angles(a, b, c)
        assert abs(sum(out) - math.pi) < 1e-12
        back = conjugate_angles(*out)
        assert back == pytest.approx((a, b, c), abs=1e-15)


class TestTripartition:
    def test_equilateral(self):
        eq = [(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)]
        kids = tripartition(eq)
        sides = [sorted(k.side_lengths()) for k in kids]
        for s in sides[1:]:
            assert s == pytest.approx(sides[0], rel=1e-12)

    def test_345(self):
        kids = tripartition([(0, 0), (3, 0), (0, 4)])
        for k in kids:
            assert any(v == pytest.approx((1, 1), abs=1e-15) for v in k)
        assert sum(k.area for k in kids) == pytest.approx(6.0, rel=1e-12)

    def test_smallest_refinement_angle_improves(self):
        # smallest angle over A1 and A2, which is what refinement will produce
        def amin(t):
            _, cls = root_class(t)
            return min(min(s) for s in cls.angle_sets())

        rng = np.random.default_rng(13)
        checked = 0
        while checked < 2000:
            pts = [tuple(p) for p in rng.normal(size=(3, 2))]
            ang = sorted(role_angles(pts))
            if not ang[2] - ang[0] < 0.39:
                continue
            checked += 1
            assert min(amin(list(k)) for k in tripartition(pts)) >= amin(pts)

    def test_needs_tripartition(self):
        assert needs_tripartition(math.pi / 3, math.pi / 3)
        assert not needs_tripartition(math.atan(0.5), math.pi / 2)
        assert not needs_tripartition(0.5, 0.9)


class TestRationalGuard:
    def test_examples(self):
        assert rational_angle_guard(math.pi / 4, 20, 1e-3) == (1, 4)
        assert rational_angle_guard(math.atan(0.5), 20, 1e-3) is None
        assert rational_angle_guard(0.4712, 20, 1e-3) == (3, 20)

    def test_bad_denominator(self):
        with pytest.raises(ValidationError):
            rational_angle_guard(0.3, 1, 1e-3)


def _refine_uniform(tri, cls, levels):
    """All tiles of a uniform refinement as (vertices, cls, parent index, role)."""
    out = [(tuple(tri), cls, None, "root")]
    frontier = [0]
    for _ in range(levels):
        nxt = []
        for i in frontier:
            verts, c, _, _ = out[i]
            for ch in pinwheel_split(verts, c, check=False).children:
                out.append((ch.vertices, ch.cls, i, ch.role))
                nxt.append(len(out) - 1)
        frontier = nxt
    return out


def test_closure_and_contraction_small_corpus():
    rng = np.random.default_rng(14)
    for _ in range(10):
        a, b, c = random_root_angles(rng)
        cls = AngleClass.of_root(a, b, c)
        A1, A2 = cls.angle_sets()
        for verts, kcls, parent, role in _refine_uniform(triangle_from_angles(a, b, c), cls, 3):
            got = sorted(role_angles(verts))
            assert got == pytest.approx(A1, abs=1e-9) or got == pytest.approx(A2, abs=1e-9)
