"""Built-in coarse triangulation of a simple polygon: ear clipping, then Delaunay flips.

No quality guarantee is made; callers get the worst aspect ratio back so
they can warn about it.
"""
import logging

from .errors import ValidationError
from .forest import CoarseMesh
from .geom import Point, aspect_ratio, orient2d, in_circle, polygon_area, point_in_polygon

log = logging.getLogger(__name__)

ASPECT_WARNING = 20.0


def _ear_clip(poly):
    idx = list(range(len(poly)))
    tris = []
    while len(idx) > 3:
        n = len(idx)
        for k in range(n):
            i, j, l = idx[k - 1], idx[k], idx[(k + 1) % n]
            if orient2d(poly[i], poly[j], poly[l]) <= 0:
                continue
            tri = (poly[i], poly[j], poly[l])
            if any(point_in_polygon(poly[m], tri) for m in idx if m not in (i, j, l)):
                continue
            tris.append((i, j, l))
            idx.pop(k)
            break
        else:
            raise ValidationError("polygon is not simple (no ear found)", code="bad_polygon")
    tris.append(tuple(idx))
    return tris


def _flip_to_delaunay(poly, tris):
    tris = [list(t) for t in tris]
    changed = True
    while changed:
        changed = False
        owner = {}
        for ti, (a, b, c) in enumerate(tris):
            for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
                owner[(u, v)] = (ti, w)
        for (u, v), (ti, w) in sorted(owner.items()):
            if (v, u) not in owner or u > v:
                continue
            tj, x = owner[(v, u)]
            if in_circle(poly[u], poly[v], poly[w], poly[x]) > 0:
                # flip only when the quad is convex
                if orient2d(poly[w], poly[x], poly[v]) > 0 and orient2d(poly[x], poly[w], poly[u]) > 0:
                    tris[ti] = [w, u, x]
                    tris[tj] = [x, v, w]
                    changed = True
                    break
    return [tuple(t) for t in tris]


def triangulate_polygon(points, warn_aspect=ASPECT_WARNING):
    """Triangulate a simple polygon given by its vertices; returns (CoarseMesh, max aspect ratio)."""
    poly = [Point(float(x), float(y)) for x, y in points]
    if len(poly) < 3:
        raise ValidationError("polygon needs at least 3 vertices", code="bad_polygon")
    if polygon_area(poly) < 0:
        poly.reverse()
    if polygon_area(poly) == 0:
        raise ValidationError("polygon has zero area", code="bad_polygon")
    tris = _flip_to_delaunay(poly, _ear_clip(poly))
    worst = max(aspect_ratio([poly[i] for i in t]) for t in tris)
    if worst > warn_aspect:
        log.warning("coarse triangulation has aspect ratio %.3g above %.3g", worst, warn_aspect)
    return CoarseMesh(poly, tris), worst


def read_polygon(path):
    """Polygon file: first line N, then N lines "x y"."""
    with open(path) as fh:
        tokens = fh.read().split()
    try:
        n = int(tokens[0])
        pts = [(float(tokens[1 + 2 * i]), float(tokens[2 + 2 * i])) for i in range(n)]
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"malformed polygon file: {exc}", code="parse") from None
    if len(tokens) != 1 + 2 * n:
        raise ValidationError("trailing data in polygon file", code="parse")
    return pts
