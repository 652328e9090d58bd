"""Generalized pinwheel subdivision rules.

A triangle is carried with its vertices in *role order* ``(A, B, C)``: the
angle at A is ``a``, at B is ``b`` and at C is ``c``, with ``a < c``. One split
introduces four points::

    F on AB   with angle FCB = a
    D on AC   with angle DFC = b
    E on AB   with angle ADE = b
    G on CF   with angle GDC = a

and five children. I = ADE, III = DGF and V = BCF are similar to the parent;
II = DEF and IV = CGD are similar to its conjugate, whose angles are
``(a, c - a, pi - c)``.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateError, ValidationError
from .geom import Point, Triangle, in_center

ROOT_SIMILAR = "root"
CONJUGATE = "conjugate"

DEFAULT_CUTOFF = 0.4
DEFAULT_MAX_DENOMINATOR = 20
DEFAULT_GUARD_TOL = 5e-3

# child -> (A-role, B-role, C-role) in terms of the parent's labelled points
CHILD_LAYOUT = {
    "I": ("A", "D", "E"),
    "II": ("F", "D", "E"),
    "III": ("D", "F", "G"),
    "IV": ("D", "C", "G"),
    "V": ("C", "B", "F"),
}
CHILD_IS_CONJUGATE = {"I": False, "II": True, "III": False, "IV": True, "V": False}
ROLES = ("I", "II", "III", "IV", "V")


def conjugate_angles(a, b, c):
    """Map (a, b, c) to (a, c - a, pi - c)."""
    if not a < c:
        raise ValidationError(f"a={a!r} >= c={c!r}", code="needs_reorder")
    if abs(a + b + c - math.pi) > 1e-12:
        raise ValidationError(f"angles sum to {a + b + c!r}")
    return a, c - a, math.pi - c


@dataclass(frozen=True)
class AngleClass:
    """Angle roles of a tile, stored relative to its root triple.

    Keeping the root angles and a kind flag (instead of recomputing from the
    conjugated floats) makes conjugation an exact involution at any depth.
    """

    kind: str
    root: tuple

    @classmethod
    def of_root(cls, a, b, c):
        if not a < c:
            raise ValidationError(f"a={a!r} >= c={c!r}", code="needs_reorder")
        return cls(ROOT_SIMILAR, (a, b, c))

    @property
    def angles(self):
        a, b, c = self.root
        if self.kind == ROOT_SIMILAR:
            return self.root
        return a, c - a, math.pi - c

    @property
    def a(self):
        return self.angles[0]

    @property
    def b(self):
        return self.angles[1]

    @property
    def c(self):
        return self.angles[2]

    def conjugate(self):
        kind = CONJUGATE if self.kind == ROOT_SIMILAR else ROOT_SIMILAR
        return AngleClass(kind, self.root)

    def angle_sets(self):
        """The two admissible angle multisets, A1 (root) and A2 (conjugate)."""
        a, b, c = self.root
        return (tuple(sorted((a, b, c))), tuple(sorted((a, c - a, math.pi - c))))


class Child(NamedTuple):
    role: str
    vertices: tuple  # role-ordered (A, B, C) points
    cls: AngleClass

    @property
    def triangle(self):
        return Triangle.make(*self.vertices)


class SubdivisionResult(NamedTuple):
    children: list
    points: dict        # label -> Point for A, B, C, D, E, F, G
    hosts: dict         # new point label -> host edge label
    hanging: tuple = ("G", "CF", "V")  # G hangs on edge CF of child V


def _ray_line(p, toward, angle, side_point, l0, l1):
    """Intersect the ray from ``p`` (direction of ``toward`` rotated by
    ``angle`` toward ``side_point``) with the line through l0, l1."""
    dx, dy = toward[0] - p[0], toward[1] - p[1]
    cross = dx * (side_point[1] - p[1]) - dy * (side_point[0] - p[0])
    s = angle if cross > 0 else -angle
    cs, sn = math.cos(s), math.sin(s)
    rx, ry = cs * dx - sn * dy, sn * dx + cs * dy
    ex, ey = l1[0] - l0[0], l1[1] - l0[1]
    den = ex * ry - ey * rx
    if den == 0.0:
        raise DegenerateError("parallel construction ray")
    # p + t r = l0 + u e; cross with r to eliminate t
    u = ((p[0] - l0[0]) * ry - (p[1] - l0[1]) * rx) / den
    return Point(l0[0] + u * ex, l0[1] + u * ey)


def role_angles(vertices):
    """Angles at the three vertices, in the order given."""
    A, B, C = vertices
    out = []
    for p, q, r in ((A, B, C), (B, C, A), (C, A, B)):
        ux, uy = q[0] - p[0], q[1] - p[1]
        vx, vy = r[0] - p[0], r[1] - p[1]
        out.append(math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy))
    return tuple(out)


def _check_roles(vertices, cls, tol):
    got = role_angles(vertices)
    if any(abs(x - y) > tol for x, y in zip(got, cls.angles)):
        raise ValidationError(
            f"measured angles {got} do not match class {cls.angles}", code="role_mismatch")


def pinwheel_split(vertices, cls, check=True):
    """Split a role-ordered triangle into its five pinwheel children."""
    a, b, c = cls.angles
    if not a < c:
        raise ValidationError(f"a={a!r} >= c={c!r}", code="needs_reorder")
    A, B, C = (Point(*v) for v in vertices)
    if check:
        Triangle.make(A, B, C).check()
        _check_roles((A, B, C), cls, 1e-9)
    F = _ray_line(C, B, a, A, A, B)
    D = _ray_line(F, C, b, A, A, C)
    E = _ray_line(D, A, b, B, A, B)
    G = _ray_line(D, C, a, F, C, F)
    pts = {"A": A, "B": B, "C": C, "D": D, "E": E, "F": F, "G": G}
    conj = cls.conjugate()
    children = []
    for role in ROLES:
        verts = tuple(pts[k] for k in CHILD_LAYOUT[role])
        if Triangle.make(*verts).is_degenerate():
            raise DegenerateError(f"child {role} of {vertices!r}")
        children.append(Child(role, verts, conj if CHILD_IS_CONJUGATE[role] else cls))
    hosts = {"D": "AC", "E": "AB", "F": "AB", "G": "CF"}
    return SubdivisionResult(children, pts, hosts)


def root_class(vertices):
    """Order a triangle's vertices as (A, B, C) with a <= b <= c.

    Returns ``(order, cls)`` where ``order`` lists the input vertex indices
    in role order. Ties keep the lower input index first.
    """
    per = [(ang, i) for i, ang in enumerate(role_angles(vertices))]
    per.sort()
    order = tuple(i for _, i in per)
    a, b, c = (ang for ang, _ in per)
    if not a < c:
        raise DegenerateError("equiangular triangle has no a < c ordering", code="needs_reorder")
    return order, AngleClass.of_root(a, b, c)


def needs_tripartition(a, c, cutoff=DEFAULT_CUTOFF):
    return c - a < cutoff


def tripartition(t, center=None):
    """Join ``center`` (default: the in-center) to the three vertices."""
    t = Triangle.make(*t).check()
    if center is None:
        center = in_center(t)
    out = [Triangle.make(t[i], t[(i + 1) % 3], center) for i in range(3)]
    for child in out:
        child.check()
    return out


def perturbed_center(t, seed, index=0, fraction=0.05):
    """In-center displaced by ``fraction`` of the inradius in a seeded direction."""
    t = Triangle.make(*t).check()
    ic = in_center(t)
    la, lb, lc = t.side_lengths()
    r = 2.0 * t.area / (la + lb + lc)
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFF, int(index)])
    theta = rng.uniform(0.0, 2.0 * math.pi)
    return Point(ic[0] + fraction * r * math.cos(theta), ic[1] + fraction * r * math.sin(theta))


def rational_angle_guard(a, max_denominator=DEFAULT_MAX_DENOMINATOR, tol=DEFAULT_GUARD_TOL):
    """Return ``(m, n)`` when ``a`` is within ``tol`` of m*pi/n, else ``None``.

    Only reduced fractions with 1 <= m < n <= max_denominator are listed; the
    closest one wins.
    """
    if max_denominator < 2:
        raise ValidationError("max_denominator must be >= 2")
    best = None
    for n in range(2, max_denominator + 1):
        for m in range(1, n):
            if math.gcd(m, n) != 1:
                continue
            gap = abs(a - m * math.pi / n)
            if gap < tol and (best is None or gap < best[0]):
                best = (gap, m, n)
    return None if best is None else (best[1], best[2])
