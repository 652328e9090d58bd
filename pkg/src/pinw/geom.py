"""Planar geometry kernel.

Points are plain ``(x, y)`` tuples (``Point`` is a named tuple, so either
works everywhere). Triangles are stored counterclockwise.
"""
import heapq
import math
from typing import NamedTuple, Sequence

from .errors import DegenerateError, ValidationError
from .predicates import in_circle, orient2d

__all__ = [
    "Point", "Triangle", "AffineMap2",
    "triangle_angles", "min_altitude", "aspect_ratio", "in_center",
    "vertex_move_affine", "distortion_bounds", "orient2d", "in_circle",
    "geodesic_distance", "point_in_polygon", "segment_in_polygon",
    "polygon_area", "is_convex", "dist",
]

DEGENERACY = 1e-14


class Point(NamedTuple):
    x: float
    y: float


def dist(p, q):
    return math.hypot(q[0] - p[0], q[1] - p[1])


def _area2(p, q, r):
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


class Triangle(NamedTuple):
    v0: Point
    v1: Point
    v2: Point

    @classmethod
    def make(cls, p, q, r):
        """Build a counterclockwise triangle, reordering if needed."""
        for v in (p, q, r):
            if not (math.isfinite(v[0]) and math.isfinite(v[1])):
                raise ValidationError(f"non-finite vertex {v!r}")
        p, q, r = Point(*p), Point(*q), Point(*r)
        if _area2(p, q, r) < 0:
            q, r = r, q
        return cls(p, q, r)

    @property
    def area(self):
        return 0.5 * abs(_area2(*self))

    def side_lengths(self):
        """Lengths of the sides opposite v0, v1, v2."""
        v0, v1, v2 = self
        return dist(v1, v2), dist(v2, v0), dist(v0, v1)

    def longest_side(self):
        return max(self.side_lengths())

    def is_degenerate(self):
        l = self.longest_side()
        return l == 0.0 or self.area < DEGENERACY * l * l

    def check(self):
        if self.is_degenerate():
            raise DegenerateError(f"triangle {tuple(self)!r}")
        return self


def triangle_angles(t):
    """Interior angles as ``[(angle, vertex_index), ...]`` for vertices 0, 1, 2."""
    t = Triangle.make(*t).check()
    out = []
    for i in range(3):
        p, q, r = t[i], t[(i + 1) % 3], t[(i + 2) % 3]
        ux, uy = q[0] - p[0], q[1] - p[1]
        vx, vy = r[0] - p[0], r[1] - p[1]
        out.append((math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy), i))
    return out


def min_altitude(t):
    t = Triangle.make(*t).check()
    return 2.0 * t.area / t.longest_side()


def aspect_ratio(t):
    """Longest side squared over area."""
    t = Triangle.make(*t).check()
    l = t.longest_side()
    return l * l / t.area


def in_center(t):
    t = Triangle.make(*t).check()
    la, lb, lc = t.side_lengths()
    s = la + lb + lc
    x = (la * t.v0[0] + lb * t.v1[0] + lc * t.v2[0]) / s
    y = (la * t.v0[1] + lb * t.v1[1] + lc * t.v2[1]) / s
    return Point(x, y)


class AffineMap2(NamedTuple):
    """x -> linear @ x + translation, with ``linear`` as ((a, b), (c, d))."""

    linear: tuple
    translation: tuple

    @classmethod
    def identity(cls):
        return cls(((1.0, 0.0), (0.0, 1.0)), (0.0, 0.0))

    def __call__(self, p):
        (a, b), (c, d) = self.linear
        return Point(a * p[0] + b * p[1] + self.translation[0],
                     c * p[0] + d * p[1] + self.translation[1])

    @property
    def det(self):
        (a, b), (c, d) = self.linear
        return a * d - b * c


def vertex_move_affine(t, moving_vertex, target):
    """The affine map fixing two vertices of ``t`` and carrying the third to ``target``.

    ``t`` is taken in the order given (no reorientation), so ``moving_vertex``
    indexes the caller's vertex order.
    """
    pts = [Point(*v) for v in t]
    Triangle.make(*pts).check()
    i = moving_vertex
    j, k = (i + 1) % 3, (i + 2) % 3
    vi, vj, vk = pts[i], pts[j], pts[k]
    image = Triangle.make(target, vj, vk)
    l = image.longest_side()
    if l == 0.0 or image.area < DEGENERACY * l * l:
        raise DegenerateError(f"moving vertex {i} to {tuple(target)!r}", code="collapse_to_segment")
    # columns: e1 = vi - vj, e2 = vk - vj; images: target - vj, e2
    e1x, e1y = vi[0] - vj[0], vi[1] - vj[1]
    e2x, e2y = vk[0] - vj[0], vk[1] - vj[1]
    f1x, f1y = target[0] - vj[0], target[1] - vj[1]
    det = e1x * e2y - e2x * e1y
    # M = F @ inv(E), inv(E) = [[e2y, -e2x], [-e1y, e1x]] / det
    a = (f1x * e2y - e2x * e1y) / det
    b = (-f1x * e2x + e2x * e1x) / det
    c = (f1y * e2y - e2y * e1y) / det
    d = (-f1y * e2x + e2y * e1x) / det
    tx = vj[0] - (a * vj[0] + b * vj[1])
    ty = vj[1] - (c * vj[0] + d * vj[1])
    return AffineMap2(((a, b), (c, d)), (tx, ty))


def distortion_bounds(m):
    """(smallest, largest) singular value of the linear part of ``m``."""
    (a, b), (c, d) = m.linear if isinstance(m, AffineMap2) else m
    p = math.hypot(a + d, c - b)
    q = math.hypot(a - d, b + c)
    return abs(p - q) / 2.0, (p + q) / 2.0


# -- polygons ---------------------------------------------------------------

def polygon_area(poly):
    s = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def is_convex(poly):
    n = len(poly)
    sign = 0
    for i in range(n):
        o = orient2d(poly[i], poly[(i + 1) % n], poly[(i + 2) % n])
        if o == 0:
            continue
        if sign == 0:
            sign = o
        elif o != sign:
            return False
    return True


def _on_segment(p, a, b):
    if orient2d(a, b, p) != 0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def point_in_polygon(p, poly, tol=0.0):
    """True for points inside or on the boundary (within ``tol``)."""
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if _on_segment(p, a, b):
            return True
        if tol > 0.0 and _point_segment_distance(p, a, b) <= tol:
            return True
    inside = False
    x, y = p
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            xc = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if xc > x:
                inside = not inside
    return inside


def _point_segment_distance(p, a, b):
    dx, dy = b[0] - a[0], b[1] - a[1]
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return dist(p, a)
    t = max(0.0, min(1.0, ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / L2))
    return math.hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy)


def _proper_cross(p, q, a, b):
    o1, o2 = orient2d(p, q, a), orient2d(p, q, b)
    o3, o4 = orient2d(a, b, p), orient2d(a, b, q)
    return o1 * o2 < 0 and o3 * o4 < 0


def segment_in_polygon(p, q, poly):
    """Whether the closed segment pq lies in the closed polygon."""
    n = len(poly)
    for i in range(n):
        if _proper_cross(p, q, poly[i], poly[(i + 1) % n]):
            return False
    # split at polygon vertices on the segment and test each piece's midpoint
    dx, dy = q[0] - p[0], q[1] - p[1]
    L2 = dx * dx + dy * dy
    ts = [0.0, 1.0]
    if L2 > 0.0:
        for v in poly:
            if _on_segment(v, p, q):
                ts.append(((v[0] - p[0]) * dx + (v[1] - p[1]) * dy) / L2)
    ts.sort()
    for t0, t1 in zip(ts, ts[1:]):
        if t1 - t0 <= 0.0:
            continue
        tm = 0.5 * (t0 + t1)
        if not point_in_polygon((p[0] + tm * dx, p[1] + tm * dy), poly):
            return False
    return True


def _reflex_vertices(poly):
    sign = 1 if polygon_area(poly) > 0 else -1
    n = len(poly)
    return [poly[i] for i in range(n)
            if orient2d(poly[i - 1], poly[i], poly[(i + 1) % n]) * sign < 0]


def geodesic_distance(domain: Sequence, p, q):
    """Length of the shortest path from p to q staying inside ``domain``."""
    poly = [Point(*v) for v in domain]
    for v in (p, q):
        if not point_in_polygon(v, poly):
            raise ValidationError(f"point {tuple(v)!r} outside domain", code="outside_domain")
    if p[0] == q[0] and p[1] == q[1]:
        return 0.0
    if is_convex(poly) or segment_in_polygon(p, q, poly):
        return dist(p, q)
    nodes = [Point(*p), Point(*q)] + _reflex_vertices(poly)
    best = {0: 0.0}
    heap = [(0.0, 0)]
    done = set()
    while heap:
        d, i = heapq.heappop(heap)
        if i in done:
            continue
        if i == 1:
            return d
        done.add(i)
        for j in range(len(nodes)):
            if j in done or j == i:
                continue
            if segment_in_polygon(nodes[i], nodes[j], poly):
                nd = d + dist(nodes[i], nodes[j])
                if nd < best.get(j, math.inf):
                    best[j] = nd
                    heapq.heappush(heap, (nd, j))
    raise ValidationError("no path inside domain", code="outside_domain")
