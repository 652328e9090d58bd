import math

import numpy as np
import pytest

from pinw.coarse import triangulate_polygon
from pinw.forest import CoarseMesh

FIG5_LIKE = CoarseMesh([(0.0, 0.0), (3.0, 0.0), (3.5, 2.0), (1.0, 2.6), (-0.5, 1.2)],
                       [(0, 1, 2), (0, 2, 3), (0, 3, 4)])


def triangle_from_angles(a, b, c, rot=0.0, scale=1.0, shift=(0.0, 0.0)):
    """Vertices (A, B, C) with angles a at A, b at B, c at C."""
    ac = math.sin(b) / math.sin(c)
    pts = [(0.0, 0.0), (1.0, 0.0), (ac * math.cos(a), ac * math.sin(a))]
    cr, sr = math.cos(rot), math.sin(rot)
    return [(shift[0] + scale * (cr * x - sr * y), shift[1] + scale * (sr * x + cr * y)) for x, y in pts]


def random_root_angles(rng):
    """Sorted a <= b <= c with c - a >= 0.4."""
    while True:
        a, b = rng.uniform(0.05, math.pi - 0.1, size=2)
        c = math.pi - a - b
        if c <= 0.05:
            continue
        a, b, c = sorted((a, b, c))
        if c - a >= 0.4:
            return a, b, c


def random_coarse(rng, n_min=4, n_max=7):
    """Random star-shaped polygon, triangulated by the built-in triangulator."""
    n = int(rng.integers(n_min, n_max + 1))
    angles = np.sort(rng.uniform(0, 2 * math.pi, size=n))
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * math.pi]]))
    if gaps.max() > 2.2:
        angles = np.linspace(0, 2 * math.pi, n, endpoint=False) + rng.uniform(0, 0.3, size=n)
    radii = rng.uniform(0.7, 1.3, size=n)
    poly = [(float(r * math.cos(t)), float(r * math.sin(t))) for r, t in zip(radii, angles)]
    coarse, _ = triangulate_polygon(poly)
    return coarse


@pytest.fixture
def fig5_coarse():
    return CoarseMesh(list(FIG5_LIKE.nodes), list(FIG5_LIKE.triangles))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(mod.RESULTS):
            terminalreporter.write_line(mod.RESULTS[k])
