"""Tiling to simplicial mesh: big edges, collapse-node passes, leaf Delaunay, assembly."""
import bisect
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateError, InvariantViolation, ValidationError
from .forest import BuildOptions, Forest, build_root_tiles, refine, refine_uniform, root_tiles_from_triangles
from .geom import Point, aspect_ratio, distortion_bounds, in_circle, min_altitude, orient2d, vertex_move_affine
from .pinwheel import CHILD_LAYOUT, ROLES

log = logging.getLogger(__name__)

DELTA_DIVISOR = 1460.0
DEFAULT_ETA = 0.05
MERGE_TOL = 1e-12
COLLINEAR_TOL = 1e-9

THEORETICAL = "theoretical"
DYNAMIC = "dynamic"

# tile edge k joins role vertices k and k+1: 0 = AB, 1 = BC, 2 = CA
_PARENT_EDGE = {frozenset("AB"): 0, frozenset("BC"): 1, frozenset("CA"): 2}
_HOST = {
    frozenset("AD"): "CA", frozenset("DC"): "CA",
    frozenset("AE"): "AB", frozenset("EF"): "AB", frozenset("BF"): "AB",
    frozenset("BC"): "BC",
    frozenset("FC"): "CF", frozenset("FG"): "CF", frozenset("CG"): "CF",
    frozenset("FD"): "FD", frozenset("DE"): "DE", frozenset("DG"): "DG",
}
_NEW_EDGES = {"CF": ("C", "F"), "FD": ("F", "D"), "DE": ("D", "E"), "DG": ("D", "G")}
_NODE_HOST = {"D": "CA", "E": "AB", "F": "AB", "G": "CF"}

# moving label -> [(sub-triangle labels with the moving vertex first, affected children)]
_SUBTRIANGLES = {
    "D": [(("D", "A", "F"), ("I", "II")), (("D", "C", "F"), ("III", "IV"))],
    "E": [(("E", "A", "D"), ("I",)), (("E", "D", "F"), ("II",))],
    "F": [(("F", "D", "E"), ("II",)), (("F", "C", "D"), ("III", "IV")), (("F", "B", "C"), ("V",))],
}


# -- big edges ---------------------------------------------------------------

@dataclass
class BigEdge:
    id: int
    endpoints: tuple
    kind: str
    creator: Optional[int] = None
    b_side: int = 0
    staying: int = 0
    adjacent: dict = field(default_factory=lambda: {1: [], -1: []})
    nodes: dict = field(default_factory=lambda: {1: [], -1: []})
    staying_nodes: list = field(default_factory=list)

    @property
    def moving(self):
        return -self.staying

    @property
    def is_boundary(self):
        return self.kind == "boundary"


@dataclass
class BigEdgeTable:
    edges: list
    tile_edge: dict          # (tile id, k) -> (big edge id, side)
    vertex_host: dict        # split vertex id -> (big edge id, side)

    def big(self, tile, k):
        return self.edges[self.tile_edge[(tile, k)][0]]


def _side(points, e0, e1, w):
    s = orient2d(points[e0], points[e1], points[w])
    if s == 0:
        raise InvariantViolation(f"vertex {w} is collinear with edge {(e0, e1)}", code="degenerate_side")
    return s


def compute_big_edges(forest):
    """Big-edge table for every tile edge, walking tiles coarsest first."""
    if not forest.refined:
        raise ValidationError("refine the forest before computing big edges", code="not_refined")
    pts = forest.points
    edges, tile_edge, vertex_host = [], {}, {}

    def new_edge(e0, e1, kind, creator=None):
        be = BigEdge(len(edges), (e0, e1), kind, creator)
        edges.append(be)
        return be

    root_keys = {}
    for tid in forest.roots:
        t = forest.tiles[tid]
        for k in range(3):
            u, v, w = t.verts[k], t.verts[(k + 1) % 3], t.verts[(k + 2) % 3]
            key = (min(u, v), max(u, v))
            be = root_keys.get(key)
            if be is None:
                be = root_keys[key] = new_edge(key[0], key[1], "root")
            side = _side(pts, key[0], key[1], w)
            if be.adjacent[side]:
                raise InvariantViolation(f"edge {key} has two roots on one side", code="nonconforming")
            be.adjacent[side].append(tid)
            tile_edge[(tid, k)] = (be.id, side)
    for be in root_keys.values():
        if not be.adjacent[1] or not be.adjacent[-1]:
            be.kind = "boundary"

    for t in forest.tiles:
        if not t.children:
            continue
        lab = dict(zip("ABC", t.verts))
        lab.update(zip("DEFG", t.split_vertices))
        fresh = {}
        for name, (p, q) in _NEW_EDGES.items():
            fresh[name] = new_edge(lab[p], lab[q], name, t.id)
        cf = fresh["CF"]
        cf.b_side = _side(pts, lab["C"], lab["F"], lab["B"])
        for cid, role in zip(t.children, ROLES):
            layout = CHILD_LAYOUT[role]
            for k in range(3):
                pair = frozenset((layout[k], layout[(k + 1) % 3]))
                third = layout[(k + 2) % 3]
                host = _HOST[pair]
                if host in _NEW_EDGES:
                    be = fresh[host]
                    side = _side(pts, be.endpoints[0], be.endpoints[1], lab[third])
                    be.adjacent[side].append(cid)
                    tile_edge[(cid, k)] = (be.id, side)
                else:
                    tile_edge[(cid, k)] = tile_edge[(t.id, _PARENT_EDGE[frozenset(host)])]
        for label in "DEF":
            host = _NODE_HOST[label]
            big_id, side = tile_edge[(t.id, _PARENT_EDGE[frozenset(host)])]
            edges[big_id].nodes[side].append(lab[label])
            vertex_host[lab[label]] = (big_id, side)
        g_side = -cf.b_side
        cf.nodes[g_side].append(lab["G"])
        vertex_host[lab["G"]] = (cf.id, g_side)
    return BigEdgeTable(edges, tile_edge, vertex_host)


def edge_param(points, be, v):
    p0, p1 = points[be.endpoints[0]], points[be.endpoints[1]]
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    p = points[v]
    return ((p[0] - p0[0]) * dx + (p[1] - p0[1]) * dy) / (dx * dx + dy * dy)


def assign_sides(forest, table):
    """Choose staying/moving sides and build the sorted staying-node lists."""
    pts = forest.points
    for be in table.edges:
        if be.is_boundary:
            be.staying = 1 if be.adjacent[1] else -1
        elif be.kind == "CF":
            be.staying = -be.b_side
        else:
            be.staying = 1 if min(be.adjacent[1]) < min(be.adjacent[-1]) else -1
        nodes = list(be.endpoints) + be.nodes[be.staying]
        nodes.sort(key=lambda v: (edge_param(pts, be, v), v))
        params = [edge_param(pts, be, v) for v in nodes]
        if any(b <= a for a, b in zip(params, params[1:])):
            raise InvariantViolation(f"staying nodes of big edge {be.id} are not strictly ordered",
                                     code="staying_order")
        be.staying_nodes = nodes
    return table


# -- delta --------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaPolicy:
    mode: str = THEORETICAL
    eta: float = DEFAULT_ETA
    divisor: float = DELTA_DIVISOR

    @classmethod
    def parse(cls, text):
        """'theoretical' or 'dynamic' or 'dynamic:0.05'."""
        if text == THEORETICAL:
            return cls(THEORETICAL)
        if text.startswith(DYNAMIC):
            rest = text[len(DYNAMIC):]
            eta = DEFAULT_ETA
            if rest:
                if not rest.startswith(":"):
                    raise ValidationError(f"bad delta mode {text!r}")
                try:
                    eta = float(rest[1:])
                except ValueError:
                    raise ValidationError(f"bad eta in {text!r}") from None
            if not 0.0 <= eta < 1.0:
                raise ValidationError(f"eta must lie in [0, 1), got {eta!r}")
            return cls(DYNAMIC, eta)
        raise ValidationError(f"unknown delta mode {text!r}")


class DynamicAcceptance:
    """Accepts a move when the compounded singular values stay in [1-eta, 1+eta]."""

    def __init__(self, eta):
        self.eta = eta

    def __call__(self, lo, hi):
        return lo >= 1.0 - self.eta and hi <= 1.0 + self.eta


def compute_delta(forest, policy=DeltaPolicy()):
    if policy.mode == THEORETICAL:
        return min(t.minalt for t in forest.tiles) / policy.divisor
    return DynamicAcceptance(policy.eta)


# -- collapse pass ---------------------------------------------------------------

@dataclass
class Move:
    tile: int
    label: str
    vertex: int
    target: int
    distance: float
    big_edge: int


@dataclass
class CollapseReport:
    delta: float
    moves: list = field(default_factory=list)
    rejected: int = 0
    identity: int = 0

    @property
    def direct(self):
        return len(self.moves)


class _Alias:
    def __init__(self):
        self.parent = {}

    def find(self, v):
        root = v
        while root in self.parent:
            root = self.parent[root]
        while v in self.parent and self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, moving, staying):
        self.parent[self.find(moving)] = self.find(staying)


def _candidates(points, be, v, delta):
    """Staying nodes of ``be`` within ``delta`` of ``v`` as (distance, id), nearest first."""
    nodes = be.staying_nodes
    params = [edge_param(points, be, s) for s in nodes]
    tv = edge_param(points, be, v)
    p0, p1 = points[be.endpoints[0]], points[be.endpoints[1]]
    length = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
    i = bisect.bisect_left(params, tv)
    pv = points[v]
    out = []
    for rng in (range(i - 1, -1, -1), range(i, len(nodes))):
        for j in rng:
            if abs(params[j] - tv) * length > delta * (1 + 1e-12) + 1e-300:
                break
            d = math.hypot(points[nodes[j]][0] - pv[0], points[nodes[j]][1] - pv[1])
            if d <= delta:
                out.append((d, nodes[j]))
    out.sort()
    return out


def collapse_pass(forest, table, policy=DeltaPolicy(), delta=None):
    """Run the collapse-node pass over all non-leaf tiles, coarsest first.

    Returns a :class:`CollapseReport`. Positions in ``forest.points`` are
    updated in place; ``forest.alias`` maps collapsed vertices to targets.
    """
    pts = forest.points
    dynamic = policy.mode == DYNAMIC
    diam = forest.diameter()
    if delta is None:
        if dynamic:
            # candidate radius in dynamic mode: anything the eta cap could allow
            delta = policy.eta * min(t.minalt for t in forest.tiles)
        else:
            delta = compute_delta(forest, policy)
    accept = DynamicAcceptance(policy.eta) if dynamic else None
    identity_tol = MERGE_TOL * diam
    report = CollapseReport(delta)
    alias = _Alias()
    forest.alias = alias
    acc_lo = [1.0] * len(forest.tiles)
    acc_hi = [1.0] * len(forest.tiles)
    forest.acc_lo, forest.acc_hi = acc_lo, acc_hi
    used = {}
    order = sorted((t.depth, t.id) for t in forest.tiles if t.children)
    for _, tid in order:
        t = forest.tiles[tid]
        lab = dict(zip("ABC", t.verts))
        lab.update(zip("DEFG", t.split_vertices))
        kids = dict(zip(ROLES, t.children))
        for label in "DEF":
            v = lab[label]
            big_id, side = table.vertex_host[v]
            be = table.edges[big_id]
            if side != be.moving:
                continue
            cands = _candidates(pts, be, v, delta)
            if not cands:
                continue
            if len(cands) > 1 and not dynamic:
                raise InvariantViolation(
                    f"vertex {v} has {len(cands)} staying nodes within delta on big edge {big_id}",
                    code="delta_property1_violation")
            dist, target = cands[0]
            key = (big_id, target)
            if key in used:
                if dynamic:
                    report.rejected += 1
                    continue
                raise InvariantViolation(
                    f"vertices {used[key]} and {v} both target staying node {target}",
                    code="delta_property2_violation")
            plan = []
            try:
                for labels, roles in _SUBTRIANGLES[label]:
                    tri = [pts[lab[x]] for x in labels]
                    m = vertex_move_affine(tri, 0, pts[target])
                    plan.append((m, distortion_bounds(m), {lab[x] for x in labels[1:]}, roles))
            except DegenerateError:
                if dynamic:
                    report.rejected += 1
                    continue
                raise InvariantViolation(f"collapse of {v} degenerates a sub-triangle",
                                         code="collapse_to_segment") from None
            subtrees = [[s for r in roles for s in forest.subtree(kids[r])] for *_, roles in plan]
            if dynamic and dist > identity_tol:
                ok = all(accept(min(acc_lo[s] for s in sub) * sv[0], max(acc_hi[s] for s in sub) * sv[1])
                         for (_, sv, _, _), sub in zip(plan, subtrees))
                if not ok:
                    report.rejected += 1
                    continue
            if dist <= identity_tol:
                report.identity += 1
            seen = {v}
            for (m, (lo, hi), fixed, _), sub in zip(plan, subtrees):
                seen |= fixed
                for s in sub:
                    acc_lo[s] *= lo
                    acc_hi[s] *= hi
                    for w in forest.tiles[s].verts:
                        if w in seen:
                            continue
                        seen.add(w)
                        if w in alias.parent:
                            continue
                        pts[w] = m(pts[w])
            pts[v] = pts[target]
            alias.union(v, target)
            used[key] = v
            report.moves.append(Move(tid, label, v, target, dist, big_id))
    return report


# -- leaf triangulation -------------------------------------------------------------

def triangulate_leaf(corners, hanging=((), (), ()), tol=COLLINEAR_TOL):
    """Delaunay triangulation of a triangle whose edges carry extra nodes.

    ``hanging[k]`` lists the nodes on edge ``corners[k] -> corners[k+1]`` in
    order from ``corners[k]``. Returns ``(points, triangles)``: the polygon
    vertices (corners and hanging nodes in boundary order, as given) and
    counterclockwise index triples into that list.
    """
    poly, labels = [], []
    for k in range(3):
        a, b = corners[k], corners[(k + 1) % 3]
        poly.append(Point(*a))
        labels.append(frozenset((k, (k - 1) % 3)))
        ex, ey = b[0] - a[0], b[1] - a[1]
        length = math.hypot(ex, ey)
        if length == 0.0:
            raise DegenerateError("leaf with coincident corners")
        for h in hanging[k]:
            off = abs((h[0] - a[0]) * ey - (h[1] - a[1]) * ex) / length
            t = ((h[0] - a[0]) * ex + (h[1] - a[1]) * ey) / (length * length)
            if off > tol * length or not 0.0 < t < 1.0:
                raise ValidationError(f"hanging node {tuple(h)!r} is off its edge", code="off_edge")
            poly.append(Point(*h))
            labels.append(frozenset((k,)))
    n = len(poly)
    ccw = orient2d(*corners) > 0
    order = list(range(n)) if ccw else [0] + list(range(n - 1, 0, -1))
    P = [poly[i] for i in order]
    L = [labels[i] for i in order]

    def chain_flat(i, j):
        # all of i..j on one side of the leaf, with something in between
        if j - i < 2:
            return False
        common = L[i]
        for x in range(i + 1, j + 1):
            common = common & L[x]
            if not common:
                return False
        return True

    tris = []
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if j - i < 2:
            continue
        best = None
        for m in range(i + 1, j):
            if L[i] & L[j] & L[m] or chain_flat(i, m) or chain_flat(m, j):
                continue
            if best is None or in_circle(P[i], P[best], P[j], P[m]) > 0:
                best = m
        if best is None:
            raise InvariantViolation("leaf polygon has no valid Delaunay apex", code="leaf_triangulation")
        tris.append((order[i], order[best], order[j]))
        stack.append((best, j))
        stack.append((i, best))
    return poly, tris


# -- mesh ----------------------------------------------------------------------------

@dataclass
class SimplicialMesh:
    nodes: np.ndarray
    triangles: np.ndarray
    provenance: np.ndarray = None

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float).reshape(-1, 2)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if self.provenance is None:
            self.provenance = np.full(len(self.triangles), -1, dtype=np.int64)
        else:
            self.provenance = np.asarray(self.provenance, dtype=np.int64)

    def edges(self):
        """Unique undirected edges as an (E, 2) array with i < j."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    def validate(self, domain=None):
        return validate_conformity(self, domain)


def validate_conformity(mesh, domain=None):
    """Check orientation, edge incidence, closed boundary and Euler characteristic.

    Raises :class:`InvariantViolation` (code ``nonconforming``) on failure and
    returns a small stats dict otherwise.
    """
    nodes, tris = mesh.nodes, mesh.triangles
    if len(tris) == 0:
        raise InvariantViolation("mesh has no triangles", code="nonconforming")
    for i, (a, b, c) in enumerate(tris):
        if orient2d(nodes[a], nodes[b], nodes[c]) <= 0:
            raise InvariantViolation(f"triangle {i} is not positively oriented", code="nonconforming")
    count = {}
    for a, b, c in tris:
        for u, v in ((a, b), (b, c), (c, a)):
            if (u, v) in count:
                raise InvariantViolation(f"directed edge {(u, v)} appears twice", code="nonconforming")
            count[(u, v)] = 1
    boundary = [(u, v) for (u, v) in count if (v, u) not in count]
    out_deg, in_deg = {}, {}
    for u, v in boundary:
        out_deg[u] = out_deg.get(u, 0) + 1
        in_deg[v] = in_deg.get(v, 0) + 1
    if any(out_deg.get(x, 0) != 1 or in_deg.get(x, 0) != 1 for x in set(out_deg) | set(in_deg)):
        raise InvariantViolation("boundary is not a set of simple loops", code="nonconforming")
    used = np.unique(tris)
    n_edges = (len(count) + len(boundary)) // 2
    euler = len(used) - n_edges + len(tris)
    if euler != 1:
        raise InvariantViolation(f"Euler characteristic {euler} != 1 (hanging node or hole)",
                                 code="nonconforming")
    if domain is not None and len(domain):
        from .geom import _point_segment_distance
        scale = max(np.ptp(nodes[:, 0]), np.ptp(nodes[:, 1]))
        m = len(domain)
        for u, v in boundary:
            mid = 0.5 * (nodes[u] + nodes[v])
            if min(_point_segment_distance(mid, domain[i], domain[(i + 1) % m]) for i in range(m)) \
                    > COLLINEAR_TOL * scale:
                raise InvariantViolation(f"edge {(u, v)} is used once but is not on the boundary",
                                         code="nonconforming")
    return {"nodes": int(len(used)), "edges": int(n_edges), "triangles": int(len(tris)),
            "boundary_edges": len(boundary)}


# -- pipeline ------------------------------------------------------------------------

@dataclass
class MeshOptions:
    build: BuildOptions = field(default_factory=BuildOptions)
    delta: DeltaPolicy = field(default_factory=DeltaPolicy)
    threads: int = 1


@dataclass
class MeshRun:
    mesh: SimplicialMesh
    forest: Forest
    table: BigEdgeTable
    collapse: Optional[CollapseReport]
    delta: float
    rep: dict
    pre_points: list
    leaf_polygons: dict
    fallback_leaves: int = 0
    timings: dict = field(default_factory=dict)

    def leaf_corners(self, tid, pre=False):
        t = self.forest.tiles[tid]
        if pre:
            return [self.pre_points[v] for v in t.verts]
        return [self.forest.points[self.rep[v]] for v in t.verts]


def _representatives(forest, alias):
    """Vertex -> representative id: collapse aliases, then a tolerance merge."""
    n = len(forest.points)
    base = [alias.find(v) if alias else v for v in range(n)]
    roots = sorted(set(base))
    xy = np.array([forest.points[v] for v in roots])
    tol = MERGE_TOL * forest.diameter()
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x
    if len(roots) > 1:
        for i, j in sorted(cKDTree(xy).query_pairs(tol)):
            a, b = find(roots[i]), find(roots[j])
            if a != b:
                parent[max(a, b)] = min(a, b)
    return [find(b) for b in base]


def _edge_orders(forest, table, rep):
    """Per big edge: merged node list (representatives) sorted along the edge."""
    pts = forest.points
    out = []
    for be in table.edges:
        ids = {rep[v] for v in be.endpoints}
        ids.update(rep[v] for v in be.nodes[1])
        ids.update(rep[v] for v in be.nodes[-1])
        ordered = sorted(ids, key=lambda v: (edge_param(pts, be, v), v))
        out.append((ordered, {v: i for i, v in enumerate(ordered)}))
    return out


def leaf_polygon(forest, table, rep, orders, tid):
    """Corner reps and per-edge hanging-node reps of leaf ``tid``."""
    t = forest.tiles[tid]
    corners = [rep[v] for v in t.verts]
    hanging = []
    for k in range(3):
        big_id, _ = table.tile_edge[(tid, k)]
        ordered, index = orders[big_id]
        i, j = index[corners[k]], index[corners[(k + 1) % 3]]
        hanging.append(ordered[i + 1:j] if i < j else ordered[j + 1:i][::-1])
    return corners, hanging


def _assemble(forest, leaf_tris, rep_positions):
    used = sorted({v for tris in leaf_tris.values() for tri in tris for v in tri})
    index = {v: i for i, v in enumerate(used)}
    nodes = np.array([rep_positions[v] for v in used], dtype=float).reshape(-1, 2)
    tris, prov = [], []
    for tid in sorted(leaf_tris):
        for a, b, c in leaf_tris[tid]:
            if orient2d(rep_positions[a], rep_positions[b], rep_positions[c]) < 0:
                b, c = c, b
            tris.append((index[a], index[b], index[c]))
            prov.append(tid)
    return SimplicialMesh(nodes, tris, prov)


def _triangulate_leaves(forest, table, rep, orders, finisher, threads=1):
    leaves = forest.leaves()
    polys = {tid: leaf_polygon(forest, table, rep, orders, tid) for tid in leaves}

    def work(tid):
        return tid, finisher(tid, *polys[tid])

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(work, leaves))
    else:
        results = [work(tid) for tid in leaves]
    return polys, dict(results)


def _delaunay_finisher(pts):
    def finish(tid, corners, hanging):
        if not any(hanging):
            return [tuple(corners)]
        poly_ids = []
        for k in range(3):
            poly_ids.append(corners[k])
            poly_ids.extend(hanging[k])
        _, tris = triangulate_leaf([pts[v] for v in corners], [[pts[v] for v in h] for h in hanging])
        return [tuple(poly_ids[i] for i in tri) for tri in tris]
    return finish


def run_pipeline(coarse, h_target, opts=None):
    """Every stage from coarse mesh to conforming simplicial mesh."""
    opts = opts or MeshOptions()
    timings = {}
    t0 = time.perf_counter()
    forest = build_root_tiles(coarse, opts.build)
    refine(forest, h_target)
    timings["refine"] = time.perf_counter() - t0
    return finish_forest(forest, opts, timings)


def finish_forest(forest, opts=None, timings=None):
    """Steps after refinement: big edges, collapse, leaf Delaunay, assembly."""
    opts = opts or MeshOptions()
    timings = dict(timings or {})
    t0 = time.perf_counter()
    pre_points = list(forest.points)
    table = assign_sides(forest, compute_big_edges(forest))
    delta = compute_delta(forest, DeltaPolicy(THEORETICAL, divisor=opts.delta.divisor))
    report = collapse_pass(forest, table, opts.delta,
                           delta if opts.delta.mode == THEORETICAL else None)
    timings["collapse"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    rep = _representatives(forest, forest.alias)
    orders = _edge_orders(forest, table, rep)
    polys, leaf_tris = _triangulate_leaves(forest, table, rep, orders,
                                           _delaunay_finisher(forest.points), opts.threads)
    mesh = _assemble(forest, leaf_tris, forest.points)
    timings["triangulate"] = time.perf_counter() - t0
    return MeshRun(mesh, forest, table, report, delta, rep, pre_points, polys, timings=timings)


def generate_mesh(coarse, h_target, opts=None):
    return run_pipeline(coarse, h_target, opts).mesh


# -- classic 1:2 family -----------------------------------------------------------------

RECT12_POINTS = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]
RECT12_TRIANGLES = [(0, 1, 2), (2, 3, 0)]


def classic_forest(levels):
    forest = root_tiles_from_triangles(RECT12_POINTS, RECT12_TRIANGLES, RECT12_POINTS)
    return refine_uniform(forest, levels)


def classic_run(levels, threads=1):
    """1:2 rectangle, ``levels`` uniform splits, medium-vertex finishing."""
    t0 = time.perf_counter()
    forest = classic_forest(levels)
    table = assign_sides(forest, compute_big_edges(forest))
    forest.alias = None
    rep = _representatives(forest, None)
    orders = _edge_orders(forest, table, rep)
    pts = forest.points
    delaunay = _delaunay_finisher(pts)
    fallbacks = []

    def finish(tid, corners, hanging):
        n_hang = sum(len(h) for h in hanging)
        if n_hang == 0:
            return [tuple(corners)]
        if n_hang == 1 and len(hanging[2]) == 1:
            a, b, c = (pts[v] for v in corners)
            m = hanging[2][0]
            mid = (0.5 * (a[0] + c[0]), 0.5 * (a[1] + c[1]))
            length = math.hypot(c[0] - a[0], c[1] - a[1])
            if math.hypot(pts[m][0] - mid[0], pts[m][1] - mid[1]) <= COLLINEAR_TOL * length:
                return [(corners[0], corners[1], m), (m, corners[1], corners[2])]
        fallbacks.append(tid)
        return delaunay(tid, corners, hanging)

    polys, leaf_tris = _triangulate_leaves(forest, table, rep, orders, finish, threads)
    if fallbacks:
        log.info("classic finishing fell back to Delaunay on %d leaves", len(fallbacks))
    mesh = _assemble(forest, leaf_tris, pts)
    run = MeshRun(mesh, forest, table, None, 0.0, rep, list(pts), polys,
                  fallback_leaves=len(fallbacks))
    run.timings["total"] = time.perf_counter() - t0
    return run


# -- diagnostics -------------------------------------------------------------------------

def leaf_distortion(run):
    """Per leaf: (post/pre min altitude, post/pre aspect ratio)."""
    out = {}
    for tid in run.forest.leaves():
        pre = run.leaf_corners(tid, pre=True)
        post = run.leaf_corners(tid)
        out[tid] = (min_altitude(post) / min_altitude(pre), aspect_ratio(post) / aspect_ratio(pre))
    return out


def collinearity_defect(run):
    """Largest distance of a big-edge node from its edge line, relative to edge length."""
    pts = run.forest.points
    worst = 0.0
    for be in run.table.edges:
        p0, p1 = pts[run.rep[be.endpoints[0]]], pts[run.rep[be.endpoints[1]]]
        ex, ey = p1[0] - p0[0], p1[1] - p0[1]
        length2 = ex * ex + ey * ey
        for side in (1, -1):
            for v in be.nodes[side]:
                p = pts[run.rep[v]]
                off = abs((p[0] - p0[0]) * ey - (p[1] - p0[1]) * ex) / length2
                worst = max(worst, off)
    return worst


def min_hanging_separation(run):
    """Smallest gap between consecutive vertices along any leaf edge."""
    pts = run.forest.points
    best = math.inf
    for corners, hanging in run.leaf_polygons.values():
        for k in range(3):
            chain = [corners[k]] + list(hanging[k]) + [corners[(k + 1) % 3]]
            for u, v in zip(chain, chain[1:]):
                best = min(best, math.hypot(pts[v][0] - pts[u][0], pts[v][1] - pts[u][1]))
    return best


__all__ = [
    "BigEdge", "BigEdgeTable", "DeltaPolicy", "DynamicAcceptance", "CollapseReport", "Move",
    "SimplicialMesh", "MeshOptions", "MeshRun", "compute_big_edges", "assign_sides",
    "compute_delta", "collapse_pass", "triangulate_leaf", "validate_conformity",
    "run_pipeline", "finish_forest", "generate_mesh", "classic_forest", "classic_run",
    "leaf_distortion", "collinearity_defect", "min_hanging_separation", "leaf_polygon",
    "THEORETICAL", "DYNAMIC",
]
