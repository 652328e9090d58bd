"""Exact-sign orientation and in-circle tests.

Both predicates evaluate the determinant in floating point first and accept
the sign when it clears a forward error bound (the static filters from
Shewchuk's robust predicates). Inputs that land inside the bound are
re-evaluated exactly with :class:`fractions.Fraction`, which is exact for any
finite double.
"""
from fractions import Fraction

_EPS = 2.0 ** -53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS


def _sign(x):
    return int(x > 0) - int(x < 0)


def orient2d(p, q, r):
    """Sign of the signed area of (p, q, r): +1 counterclockwise, -1 clockwise, 0 collinear."""
    detleft = (p[0] - r[0]) * (q[1] - r[1])
    detright = (p[1] - r[1]) * (q[0] - r[0])
    det = detleft - detright
    if detleft > 0.0:
        if detright <= 0.0:
            return _sign(det)
        detsum = detleft + detright
    elif detleft < 0.0:
        if detright >= 0.0:
            return _sign(det)
        detsum = -detleft - detright
    else:
        return _sign(det)
    if abs(det) >= _CCW_BOUND * detsum:
        return _sign(det)
    return _orient2d_exact(p, q, r)


def _orient2d_exact(p, q, r):
    px, py = Fraction(float(p[0])), Fraction(float(p[1]))
    qx, qy = Fraction(float(q[0])), Fraction(float(q[1]))
    rx, ry = Fraction(float(r[0])), Fraction(float(r[1]))
    return _sign((px - rx) * (qy - ry) - (py - ry) * (qx - rx))


def in_circle(p, q, r, s):
    """Positive when s is strictly inside the circle through p, q, r.

    The sign convention assumes (p, q, r) is counterclockwise; for a clockwise
    triple the result is negated, as with the raw determinant.
    """
    adx, ady = p[0] - s[0], p[1] - s[1]
    bdx, bdy = q[0] - s[0], q[1] - s[1]
    cdx, cdy = r[0] - s[0], r[1] - s[1]

    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    alift = adx * adx + ady * ady
    cdxady = cdx * ady
    adxcdy = adx * cdy
    blift = bdx * bdx + bdy * bdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    clift = cdx * cdx + cdy * cdy

    det = (alift * (bdxcdy - cdxbdy)
           + blift * (cdxady - adxcdy)
           + clift * (adxbdy - bdxady))
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    if abs(det) > _ICC_BOUND * permanent:
        return _sign(det)
    return _in_circle_exact(p, q, r, s)


def _in_circle_exact(p, q, r, s):
    sx, sy = Fraction(float(s[0])), Fraction(float(s[1]))
    rows = []
    for v in (p, q, r):
        dx = Fraction(float(v[0])) - sx
        dy = Fraction(float(v[1])) - sy
        rows.append((dx, dy, dx * dx + dy * dy))
    (a0, a1, a2), (b0, b1, b2), (c0, c1, c2) = rows
    det = (a2 * (b0 * c1 - c0 * b1)
           + b2 * (c0 * a1 - a0 * c1)
           + c2 * (a0 * b1 - b0 * a1))
    return _sign(det)
