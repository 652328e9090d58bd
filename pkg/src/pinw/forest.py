"""The tile hierarchy: coarse mesh input, root tiles and heap-driven refinement."""
import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import DegenerateError, ValidationError
from .geom import Point, Triangle, in_center, min_altitude, orient2d
from .pinwheel import (
    DEFAULT_CUTOFF, DEFAULT_GUARD_TOL, DEFAULT_MAX_DENOMINATOR, ROLES,
    AngleClass, needs_tripartition, perturbed_center, pinwheel_split,
    rational_angle_guard, role_angles, root_class,
)

log = logging.getLogger(__name__)

ROOT = "root"
TRIPART = "tripart"


# -- coarse mesh -----------------------------------------------------------

@dataclass
class CoarseMesh:
    nodes: list
    triangles: list

    @classmethod
    def parse(cls, text):
        tokens = text.split()
        try:
            n, m = int(tokens[0]), int(tokens[1])
            pos = 2
            nodes = []
            for _ in range(n):
                nodes.append(Point(float(tokens[pos]), float(tokens[pos + 1])))
                pos += 2
            tris = []
            for _ in range(m):
                tris.append((int(tokens[pos]), int(tokens[pos + 1]), int(tokens[pos + 2])))
                pos += 3
        except (IndexError, ValueError) as exc:
            raise ValidationError(f"malformed mesh file: {exc}", code="parse") from None
        if pos != len(tokens):
            raise ValidationError("trailing data in mesh file", code="parse")
        return cls(nodes, tris)

    @classmethod
    def read(cls, path):
        with open(path) as fh:
            return cls.parse(fh.read())

    def edges(self):
        """Directed edge -> triangle index."""
        out = {}
        for t, (i, j, k) in enumerate(self.triangles):
            for u, v in ((i, j), (j, k), (k, i)):
                if (u, v) in out:
                    raise ValidationError(f"edge {(u, v)} used twice in the same direction",
                                          code="nonconforming")
                out[(u, v)] = t
        return out

    def boundary_edges(self):
        directed = self.edges()
        return [(u, v) for (u, v) in directed if (v, u) not in directed]

    def boundary_loop(self):
        """The outer boundary as a counterclockwise list of points."""
        succ = {}
        for u, v in self.boundary_edges():
            if u in succ:
                raise ValidationError(f"boundary is not a simple loop at node {u}", code="nonconforming")
            succ[u] = v
        if not succ:
            raise ValidationError("empty mesh")
        start = min(succ)
        loop = [start]
        v = succ[start]
        while v != start:
            loop.append(v)
            v = succ[v]
            if len(loop) > len(succ):
                raise ValidationError("boundary does not close", code="nonconforming")
        if len(loop) != len(succ):
            raise ValidationError("boundary has several loops (holes are not supported)",
                                  code="nonconforming")
        return [self.nodes[i] for i in loop]

    def validate(self):
        n = len(self.nodes)
        for t, tri in enumerate(self.triangles):
            if len(set(tri)) != 3 or not all(0 <= i < n for i in tri):
                raise ValidationError(f"triangle {t} has bad indices {tri}", code="nonconforming")
            p, q, r = (self.nodes[i] for i in tri)
            if Triangle.make(p, q, r).is_degenerate():
                raise DegenerateError(f"coarse triangle {t}")
            if orient2d(p, q, r) <= 0:
                raise ValidationError(f"triangle {t} is not counterclockwise", code="nonconforming")
        boundary = self.boundary_edges()
        # a node strictly inside some edge means a hanging node
        directed = self.edges()
        used = sorted({i for tri in self.triangles for i in tri})
        for (u, v) in directed:
            if u > v and (v, u) in directed:
                continue
            pu, pv = self.nodes[u], self.nodes[v]
            for w in used:
                if w in (u, v):
                    continue
                pw = self.nodes[w]
                if orient2d(pu, pv, pw) == 0 and _strictly_between(pw, pu, pv):
                    raise ValidationError(f"node {w} hangs on edge {(u, v)}", code="nonconforming")
        self.boundary_loop()
        return boundary

    def format(self):
        lines = [f"{len(self.nodes)} {len(self.triangles)}"]
        lines += [f"{x!r} {y!r}" for x, y in self.nodes]
        lines += [f"{i} {j} {k}" for i, j, k in self.triangles]
        return "\n".join(lines) + "\n"


def _strictly_between(p, a, b):
    if a[0] != b[0]:
        return min(a[0], b[0]) < p[0] < max(a[0], b[0])
    return min(a[1], b[1]) < p[1] < max(a[1], b[1])


# -- tiles -----------------------------------------------------------------

@dataclass
class Tile:
    id: int
    verts: tuple            # vertex ids in role order (A, B, C)
    cls: AngleClass
    parent: Optional[int]
    depth: int
    role: str
    minalt: float           # measured at creation, before any collapse
    source: int = -1        # coarse triangle index
    children: tuple = ()
    split_vertices: Optional[tuple] = None  # (D, E, F, G) vertex ids

    @property
    def is_leaf(self):
        return not self.children


@dataclass
class BuildOptions:
    cutoff: float = DEFAULT_CUTOFF
    rational_guard: bool = True
    max_denominator: int = DEFAULT_MAX_DENOMINATOR
    guard_tol: float = DEFAULT_GUARD_TOL
    seed: int = 0
    perturb_fraction: float = 0.05
    perturb_tries: int = 32


@dataclass
class Forest:
    points: list
    tiles: list = field(default_factory=list)
    roots: list = field(default_factory=list)
    domain: list = field(default_factory=list)
    heap: list = field(default_factory=list)
    split_log: list = field(default_factory=list)
    tripartitions: int = 0
    refined: bool = False

    def add_point(self, p):
        self.points.append(Point(float(p[0]), float(p[1])))
        return len(self.points) - 1

    def coords(self, tile):
        t = self.tiles[tile] if isinstance(tile, int) else tile
        return tuple(self.points[v] for v in t.verts)

    def _add_tile(self, verts, cls, parent, depth, role, source):
        tid = len(self.tiles)
        t = Tile(tid, tuple(verts), cls, parent, depth, role,
                 min_altitude([self.points[v] for v in verts]), source)
        self.tiles.append(t)
        return t

    def add_root(self, verts, role, source):
        order, cls = root_class([self.points[v] for v in verts])
        t = self._add_tile([verts[i] for i in order], cls, None, 0, role, source)
        self.roots.append(t.id)
        return t

    def split(self, tid):
        """Pinwheel-split leaf ``tid``; returns the five child ids."""
        t = self.tiles[tid]
        if t.children:
            raise ValidationError(f"tile {tid} is already split")
        res = pinwheel_split(self.coords(t), t.cls, check=False)
        ids = dict(zip("ABC", t.verts))
        for label in "DEFG":
            ids[label] = self.add_point(res.points[label])
        kids = []
        for child in res.children:
            from .pinwheel import CHILD_LAYOUT
            verts = tuple(ids[k] for k in CHILD_LAYOUT[child.role])
            kids.append(self._add_tile(verts, child.cls, tid, t.depth + 1, child.role, t.source).id)
        t.children = tuple(kids)
        t.split_vertices = tuple(ids[k] for k in "DEFG")
        return t.children

    def leaves(self):
        return [t.id for t in self.tiles if not t.children]

    def depth_stats(self):
        depths = [t.depth for t in self.tiles if not t.children]
        return min(depths), max(depths), len(self.tiles)

    def pinwheel_splits(self):
        return sum(1 for t in self.tiles if t.children)

    def diameter(self):
        xs = [p[0] for p in self.points]
        ys = [p[1] for p in self.points]
        return math.hypot(max(xs) - min(xs), max(ys) - min(ys))

    def subtree(self, tid):
        """Tile ids of ``tid`` and all its descendants (preorder)."""
        out = []
        stack = [tid]
        while stack:
            t = stack.pop()
            out.append(t)
            stack.extend(reversed(self.tiles[t].children))
        return out


GUARD_RING_SCALES = (1, 2, 4, 7, 10, 14)


def _guard_flags(tri, opts):
    a = min(role_angles(tri))
    return rational_angle_guard(a, opts.max_denominator, opts.guard_tol)


def _tripartition_center(tri, idx, near_eq, opts):
    """Choose the tripartition point for coarse triangle ``idx``."""
    if near_eq and not opts.rational_guard:
        return in_center(tri)
    candidates = []
    if near_eq:
        candidates.append(in_center(tri))
    # first ring uses the nominal offset; wider rings only if every direction is flagged
    for ring, scale in enumerate(GUARD_RING_SCALES):
        for k in range(opts.perturb_tries):
            index = ring * 1_000_003 + idx * opts.perturb_tries + k
            candidates.append(perturbed_center(tri, opts.seed, index, scale * opts.perturb_fraction))
    for center in candidates:
        kids = [(tri[i], tri[(i + 1) % 3], center) for i in range(3)]
        if all(_guard_flags(k, opts) is None for k in kids):
            return center
    raise ValidationError(f"could not find an unflagged tripartition for coarse triangle {idx}",
                          code="rational_guard")


def build_root_tiles(coarse, opts=None):
    """Root tiles from a coarse mesh: preliminary in-center splits, guard, roles."""
    opts = opts or BuildOptions()
    coarse.validate()
    forest = Forest(points=[Point(*p) for p in coarse.nodes], domain=coarse.boundary_loop())
    for idx, tri in enumerate(coarse.triangles):
        pts = [forest.points[i] for i in tri]
        a, _, c = sorted(role_angles(pts))
        near_eq = needs_tripartition(a, c, opts.cutoff)
        flagged = opts.rational_guard and _guard_flags(pts, opts) is not None
        if near_eq or flagged:
            center = _tripartition_center(pts, idx, near_eq, opts)
            cid = forest.add_point(center)
            for i in range(3):
                forest.add_root((tri[i], tri[(i + 1) % 3], cid), TRIPART, idx)
            forest.tripartitions += 1
        else:
            forest.add_root(tuple(tri), ROOT, idx)
    return forest


def root_tiles_from_triangles(points, triangles, domain=None):
    """Roots taken verbatim (no preliminary splits); used by the classic 1:2 runs."""
    forest = Forest(points=[Point(*p) for p in points], domain=list(domain or []))
    for idx, tri in enumerate(triangles):
        forest.add_root(tuple(tri), ROOT, idx)
    return forest


def refine(forest, h_target):
    """Split leaves in decreasing min-altitude order until all are below ``h_target``."""
    if not h_target > 0:
        raise ValidationError("h_target must be positive")
    if h_target < 1e-9 * forest.diameter():
        raise ValidationError(f"h_target={h_target!r}", code="refinement_too_deep")
    heap = [(-forest.tiles[t].minalt, t) for t in forest.leaves()]
    heapq.heapify(heap)
    while heap and -heap[0][0] >= h_target:
        _, tid = heapq.heappop(heap)
        forest.split_log.append(tid)
        for k in forest.split(tid):
            heapq.heappush(heap, (-forest.tiles[k].minalt, k))
    forest.heap = heap
    forest.refined = True
    return forest


def refine_uniform(forest, levels):
    """Split every leaf ``levels`` times."""
    for _ in range(levels):
        for tid in forest.leaves():
            forest.split_log.append(tid)
            forest.split(tid)
    forest.refined = True
    return forest


def leaves(forest):
    return forest.leaves()


def depth_stats(forest):
    return forest.depth_stats()


__all__ = [
    "CoarseMesh", "Tile", "Forest", "BuildOptions", "build_root_tiles",
    "root_tiles_from_triangles", "refine", "refine_uniform", "leaves", "depth_stats",
    "ROLES",
]
