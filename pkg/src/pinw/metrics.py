"""Skeleton graphs, the l-path deviation ratio, baselines and quality reports."""
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .errors import ValidationError
from .geom import is_convex, polygon_area
from .meshgen import MERGE_TOL, MeshRun, SimplicialMesh, _edge_orders, _representatives, assign_sides, \
    compute_big_edges, leaf_polygon
from .forest import Forest

DEFAULT_CHUNK = 256


@dataclass
class SkeletonGraph:
    vertices: np.ndarray
    edges: np.ndarray
    lengths: np.ndarray
    graph: csr_matrix = field(repr=False, default=None)

    @classmethod
    def from_edges(cls, vertices, edges):
        vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        e = np.sort(e, axis=1)
        e = e[e[:, 0] != e[:, 1]]
        e = np.unique(e, axis=0)
        lengths = np.hypot(*(vertices[e[:, 1]] - vertices[e[:, 0]]).T)
        n = len(vertices)
        g = csr_matrix((np.concatenate([lengths, lengths]),
                        (np.concatenate([e[:, 0], e[:, 1]]), np.concatenate([e[:, 1], e[:, 0]]))),
                       shape=(n, n))
        return cls(vertices, e, lengths, g)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)


def _dedupe(vertices, edges, tol):
    vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
    parent = list(range(len(vertices)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    if len(vertices) > 1 and tol > 0:
        for i, j in sorted(cKDTree(vertices).query_pairs(tol)):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    roots = sorted({find(i) for i in range(len(vertices))})
    index = {r: k for k, r in enumerate(roots)}
    remap = np.array([index[find(i)] for i in range(len(vertices))], dtype=np.int64)
    return vertices[roots], remap[np.asarray(edges, dtype=np.int64).reshape(-1, 2)]


def _diameter(xy):
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    return float(np.hypot(*np.ptp(xy, axis=0))) if len(xy) else 0.0


def _polygon_skeleton(points, polygons):
    edges = []
    for corners, hanging in polygons:
        for k in range(3):
            chain = [corners[k]] + list(hanging[k]) + [corners[(k + 1) % 3]]
            edges.extend(zip(chain, chain[1:]))
    used = sorted({v for e in edges for v in e})
    index = {v: i for i, v in enumerate(used)}
    xy = np.array([points[v] for v in used], dtype=float)
    return xy, [(index[u], index[v]) for u, v in edges]


def build_skeleton(source):
    """1-skeleton of a mesh, a finished pipeline run (tiling) or a refined forest.

    Tile edges carrying hanging nodes contribute their sub-segments.
    """
    if isinstance(source, SimplicialMesh):
        xy, edges = source.nodes, source.edges()
    elif isinstance(source, MeshRun):
        xy, edges = _polygon_skeleton(source.forest.points, source.leaf_polygons.values())
    elif isinstance(source, Forest):
        table = assign_sides(source, compute_big_edges(source))
        rep = _representatives(source, None)
        orders = _edge_orders(source, table, rep)
        polys = [leaf_polygon(source, table, rep, orders, t) for t in source.leaves()]
        xy, edges = _polygon_skeleton(source.points, polys)
    else:
        raise ValidationError(f"cannot build a skeleton from {type(source).__name__}")
    xy, edges = _dedupe(xy, edges, MERGE_TOL * _diameter(xy))
    return SkeletonGraph.from_edges(xy, edges)


# -- geodesic distances ------------------------------------------------------------

class GeodesicOracle:
    """Batch shortest-path distances inside a simple polygon.

    Direct distance when the segment is visible, otherwise the best route
    through reflex vertices.
    """

    def __init__(self, domain):
        poly = np.asarray(domain, dtype=float).reshape(-1, 2)
        if polygon_area(poly) < 0:
            poly = poly[::-1]
        self.poly = poly
        self.convex = is_convex([tuple(p) for p in poly])
        self.scale = _diameter(poly)
        n = len(poly)
        prev, nxt = np.roll(poly, 1, axis=0), np.roll(poly, -1, axis=0)
        cross = (poly[:, 0] - prev[:, 0]) * (nxt[:, 1] - poly[:, 1]) - \
                (poly[:, 1] - prev[:, 1]) * (nxt[:, 0] - poly[:, 0])
        self.reflex = poly[cross < 0] if n > 3 else poly[:0]
        R = len(self.reflex)
        if R:
            vis = self.visible(self.reflex, self.reflex)
            dr = np.where(vis, cdist(self.reflex, self.reflex), np.inf)
            for k in range(R):
                dr = np.minimum(dr, dr[:, k:k + 1] + dr[k:k + 1, :])
            self.reflex_dist = dr

    def _inside(self, pts):
        """Closed point-in-polygon for an (m, 2) array."""
        poly = self.poly
        a, b = poly, np.roll(poly, -1, axis=0)
        x, y = pts[:, 0:1], pts[:, 1:2]
        ay, by = a[None, :, 1], b[None, :, 1]
        cond = (ay > y) != (by > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = a[None, :, 0] + (y - ay) * (b[None, :, 0] - a[None, :, 0]) / (by - ay)
        crossings = np.sum(cond & (xc > x), axis=1)
        inside = crossings % 2 == 1
        # on-boundary check
        d = b - a
        L2 = np.sum(d * d, axis=1)
        t = np.clip(((x - a[None, :, 0]) * d[None, :, 0] + (y - a[None, :, 1]) * d[None, :, 1]) / L2, 0, 1)
        px = a[None, :, 0] + t * d[None, :, 0] - x
        py = a[None, :, 1] + t * d[None, :, 1] - y
        near = np.min(np.hypot(px, py), axis=1) <= 1e-12 * self.scale
        return inside | near

    def visible(self, P, Q):
        """(m, n) mask: segment P_i Q_j stays in the closed polygon."""
        P = np.asarray(P, dtype=float).reshape(-1, 2)
        Q = np.asarray(Q, dtype=float).reshape(-1, 2)
        ok = np.ones((len(P), len(Q)), dtype=bool)
        if self.convex:
            return ok
        poly = self.poly
        for a, b in zip(poly, np.roll(poly, -1, axis=0)):
            o1 = (b[0] - a[0]) * (P[:, 1] - a[1]) - (b[1] - a[1]) * (P[:, 0] - a[0])
            o2 = (b[0] - a[0]) * (Q[:, 1] - a[1]) - (b[1] - a[1]) * (Q[:, 0] - a[0])
            dx = Q[None, :, 0] - P[:, None, 0]
            dy = Q[None, :, 1] - P[:, None, 1]
            o3 = dx * (a[1] - P[:, None, 1]) - dy * (a[0] - P[:, None, 0])
            o4 = dx * (b[1] - P[:, None, 1]) - dy * (b[0] - P[:, None, 0])
            ok &= ~((o1[:, None] * o2[None, :] < 0) & (o3 * o4 < 0))
        for s in (0.25, 0.5, 0.75):
            mid = (1 - s) * P[:, None, :] + s * Q[None, :, :]
            ok &= self._inside(mid.reshape(-1, 2)).reshape(ok.shape)
        return ok

    def distances(self, P, Q):
        P = np.asarray(P, dtype=float).reshape(-1, 2)
        Q = np.asarray(Q, dtype=float).reshape(-1, 2)
        direct = cdist(P, Q)
        if self.convex or not len(self.reflex):
            return direct
        vis = self.visible(P, Q)
        AP = np.where(self.visible(P, self.reflex), cdist(P, self.reflex), np.inf)
        AQ = np.where(self.visible(Q, self.reflex), cdist(Q, self.reflex), np.inf)
        B = np.min(AP[:, :, None] + self.reflex_dist[None, :, :], axis=1)
        via = np.min(B[:, None, :] + AQ[None, :, :], axis=2)
        return np.where(vis, direct, via)


# -- deviation ratio ----------------------------------------------------------------

@dataclass
class DeviationReport:
    ratio: float
    p: int
    q: int
    path: list
    l: float
    elapsed: float
    path_length: float = 0.0
    geodesic: float = 0.0


def shortest_paths(skel, sources):
    return dijkstra(skel.graph, directed=False, indices=np.asarray(sources))


def deviation_ratio(skel, l, domain=None, chunk=DEFAULT_CHUNK, threads=1, rel_tol=1e-9,
                    candidates=None):
    """Maximum graph distance over geodesic distance for vertex pairs at least ``l`` apart.

    ``domain`` defaults to the convex case (geodesic = Euclidean). ``candidates``
    optionally restricts both endpoints to a subset of vertex ids. Pairs whose
    Euclidean distance is within ``rel_tol`` of ``l`` count as qualifying,
    which absorbs rounding in constructed coordinates.
    """
    if not l > 0:
        raise ValidationError("l must be positive")
    t0 = time.perf_counter()
    X = skel.vertices
    ids = np.arange(len(X)) if candidates is None else np.unique(np.asarray(candidates, dtype=np.int64))
    oracle = None if domain is None else GeodesicOracle(domain)
    if oracle is not None and oracle.convex:
        oracle = None
    Xc = X[ids]
    limit = l * (1.0 - rel_tol)
    starts = list(range(0, len(ids), chunk))

    def work(start):
        src = ids[start:start + chunk]
        D = shortest_paths(skel, src)[:, ids]
        E = cdist(X[src], Xc)
        G = E if oracle is None else oracle.distances(X[src], Xc)
        mask = (E >= limit) & (ids[None, :] > src[:, None])
        with np.errstate(divide="ignore", invalid="ignore"):
            R = np.where(mask, D / G, -np.inf)
        k = int(np.argmax(R))
        i, j = divmod(k, R.shape[1])
        return R[i, j], int(src[i]), int(ids[j]), D[i, j], G[i, j]

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(work, starts))
    else:
        results = [work(s) for s in starts]
    best = None
    for r in results:
        if r[0] > -np.inf and (best is None or r[0] > best[0]):
            best = r
    if best is None:
        raise ValidationError(f"no vertex pair is at least {l!r} apart", code="l_too_large")
    ratio, p, q, dpq, gpq = best
    _, pred = dijkstra(skel.graph, directed=False, indices=p, return_predecessors=True)
    path = [q]
    while path[-1] != p:
        nxt = pred[path[-1]]
        if nxt < 0:
            raise ValidationError("skeleton is disconnected", code="disconnected")
        path.append(int(nxt))
    path.reverse()
    return DeviationReport(float(ratio), p, q, path, l, time.perf_counter() - t0, float(dpq), float(gpq))


# -- baselines ---------------------------------------------------------------------------

def grid_mesh(n):
    """Unit square, n x n cells, each cut by the same diagonal."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    xs = np.linspace(0.0, 1.0, n + 1)
    nodes = np.array([(x, y) for y in xs for x in xs])
    idx = lambda i, j: j * (n + 1) + i
    tris = []
    for j in range(n):
        for i in range(n):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            tris += [(a, b, c), (a, c, d)]
    return SimplicialMesh(nodes, tris)


def cross_triangle_mesh(n):
    """Unit square, n x n cells, each cut by both diagonals."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    xs = np.linspace(0.0, 1.0, n + 1)
    corners = [(x, y) for y in xs for x in xs]
    centers = [((i + 0.5) / n, (j + 0.5) / n) for j in range(n) for i in range(n)]
    nodes = np.array(corners + centers)
    idx = lambda i, j: j * (n + 1) + i
    tris = []
    for j in range(n):
        for i in range(n):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            m = (n + 1) ** 2 + j * n + i
            tris += [(a, b, m), (b, c, m), (c, d, m), (d, a, m)]
    return SimplicialMesh(nodes, tris)


UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


# -- quality ----------------------------------------------------------------------------

def _triangle_arrays(mesh):
    P = mesh.nodes[mesh.triangles]
    a = np.hypot(*(P[:, 2] - P[:, 1]).T)
    b = np.hypot(*(P[:, 0] - P[:, 2]).T)
    c = np.hypot(*(P[:, 1] - P[:, 0]).T)
    u, v = P[:, 1] - P[:, 0], P[:, 2] - P[:, 0]
    area = 0.5 * np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
    return P, np.stack([a, b, c], axis=1), area


def quality_report(mesh, bins=12):
    P, sides, area = _triangle_arrays(mesh)
    angles = []
    for i in range(3):
        p, q, r = P[:, i], P[:, (i + 1) % 3], P[:, (i + 2) % 3]
        u, v = q - p, r - p
        angles.append(np.arctan2(np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]), np.sum(u * v, axis=1)))
    min_angles = np.min(np.stack(angles, axis=1), axis=1)
    longest = np.max(sides, axis=1)
    minalt = 2.0 * area / longest
    aspect = longest ** 2 / area
    hist, edges = np.histogram(np.degrees(min_angles), bins=bins, range=(0.0, 60.0))
    return {
        "triangles": int(len(mesh.triangles)),
        "nodes": int(len(mesh.nodes)),
        "min_angle": float(min_angles.min()),
        "max_aspect_ratio": float(aspect.max()),
        "min_min_altitude": float(minalt.min()),
        "max_min_altitude": float(minalt.max()),
        "min_angle_histogram_deg": {"edges": [float(e) for e in edges], "counts": [int(c) for c in hist]},
    }


def product_bound(s, t, k):
    """Bounds (lower, upper) on prod_i (1 - s t^i)^k and prod_i (1 + s t^i)^k."""
    if not (0 < s < 1 and 0 < t < 1) or int(k) != k or k < 1:
        raise ValidationError(f"need 0<s<1, 0<t<1, integer k>=1; got {(s, t, k)!r}")
    x = k * s / (1.0 - t)
    return 1.0 - x, math.exp(x)


def product_numeric(s, t, k, terms=200):
    """Truncated products (prod (1 - s t^i)^k, prod (1 + s t^i)^k)."""
    lo = hi = 1.0
    for i in range(terms):
        lo *= (1.0 - s * t ** i) ** k
        hi *= (1.0 + s * t ** i) ** k
    return lo, hi


__all__ = [
    "SkeletonGraph", "DeviationReport", "GeodesicOracle", "build_skeleton", "deviation_ratio",
    "shortest_paths", "grid_mesh", "cross_triangle_mesh", "quality_report", "product_bound",
    "product_numeric", "UNIT_SQUARE",
]
