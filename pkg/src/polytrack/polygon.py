"""Simple polygon model, validation, ear-clipping triangulation, point location."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from shapely.geometry import Point, Polygon as ShapelyPolygon
from shapely.ops import nearest_points

from .primitives import EPS_GEO_REL, orient2d, seg_point_distance


class PolygonError(ValueError):
    """Invalid polygon input."""


class TooFewVertices(PolygonError):
    pass


class RepeatedVertex(PolygonError):
    pass


class SelfIntersection(PolygonError):
    pass


class ZeroArea(PolygonError):
    pass


class OutsidePolygon(ValueError):
    """A query point lies outside the polygon."""


def _signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


class SimplePolygon:
    """A simple polygon with counter-clockwise vertex order.

    Vertices are stored as an (n, 2) float array. Input in clockwise order is
    reversed on construction; degenerate input raises a PolygonError subclass.
    """

    def __init__(self, vertices):
        pts = np.asarray(vertices, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise PolygonError("vertices must be an (n, 2) array")
        if len(pts) >= 2 and np.allclose(pts[0], pts[-1]):
            pts = pts[:-1]  # accept closed rings
        if len(pts) < 3:
            raise TooFewVertices(f"need at least 3 vertices, got {len(pts)}")
        # pairwise coincidence check
        diam = 0.0
        for i in range(len(pts)):
            d = np.hypot(pts[:, 0] - pts[i, 0], pts[:, 1] - pts[i, 1])
            diam = max(diam, float(d.max()))
        tol = EPS_GEO_REL * max(diam, 1e-300)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if np.hypot(*(pts[i] - pts[j])) <= tol:
                    raise RepeatedVertex(f"vertices {i} and {j} coincide")
        area = _signed_area(pts)
        if abs(area) <= tol * tol:
            raise ZeroArea("polygon area is zero")
        if area < 0:
            pts = pts[::-1].copy()
        self.vertices = pts
        self.n = len(pts)
        self.diameter = diam
        self.eps = EPS_GEO_REL * diam
        self._check_simple()

    def _check_simple(self):
        n = self.n
        v = self.vertices
        for i in range(n):
            a, b = v[i], v[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue  # shared endpoint with neighbor edges
                c, d = v[j], v[(j + 1) % n]
                o1 = orient2d(a, b, c)
                o2 = orient2d(a, b, d)
                o3 = orient2d(c, d, a)
                o4 = orient2d(c, d, b)
                if o1 * o2 < 0 and o3 * o4 < 0:
                    raise SelfIntersection(f"edges {i} and {j} cross")
                # collinear overlap / touching counts as non-simple too
                if o1 == 0 and o2 == 0 and o3 == 0 and o4 == 0:
                    # both segments on one line: reject if they overlap
                    axis = 0 if abs(b[0] - a[0]) >= abs(b[1] - a[1]) else 1
                    lo1, hi1 = sorted((a[axis], b[axis]))
                    lo2, hi2 = sorted((c[axis], d[axis]))
                    if min(hi1, hi2) - max(lo1, lo2) > self.eps:
                        raise SelfIntersection(f"edges {i} and {j} overlap")
        # a vertex resting on a non-incident edge pinches the boundary
        for k in range(n):
            for i in range(n):
                if i == k or (i + 1) % n == k:
                    continue
                if seg_point_distance(v[k], v[i], v[(i + 1) % n])[0] <= self.eps:
                    raise SelfIntersection(f"vertex {k} touches edge {i}")

    @cached_property
    def shapely(self) -> ShapelyPolygon:
        return ShapelyPolygon(self.vertices)

    @cached_property
    def area(self) -> float:
        return abs(_signed_area(self.vertices))

    @cached_property
    def edge_arrays(self):
        """(A, B) arrays of edge start/end points, each (n, 2)."""
        v = self.vertices
        return v, np.roll(v, -1, axis=0)

    def edge(self, i: int):
        return self.vertices[i], self.vertices[(i + 1) % self.n]

    def contains(self, p, tol: float | None = None) -> bool:
        """Closed containment: boundary points count as inside."""
        tol = self.eps if tol is None else tol
        pt = Point(p[0], p[1])
        if self.shapely.covers(pt):
            return True
        return self.shapely.exterior.distance(pt) <= tol

    def boundary_distance(self, p) -> float:
        return float(self.shapely.exterior.distance(Point(p[0], p[1])))

    @cached_property
    def _snap_core(self) -> ShapelyPolygon:
        """Slightly inward-buffered copy; snapping target for wall-grazing points."""
        return self.shapely.buffer(-1e-12 * self.diameter)

    def snap_inside(self, p) -> np.ndarray:
        """p unchanged when covered; wall points a few ulp outside snap inward.

        Clipping offset curves against the wall can leave their joints outside
        the ring at float precision, where exact segment predicates treat them
        as external; query entry points snap such points in first. Points more
        than eps outside are returned unchanged (the caller's containment
        policy applies).
        """
        q = np.asarray(p, float)
        pt = Point(q[0], q[1])
        if self.shapely.covers(pt):
            return q
        if self.shapely.exterior.distance(pt) > self.eps or self._snap_core.is_empty:
            return q
        near, _ = nearest_points(self._snap_core, pt)
        return np.array([near.x, near.y])

    def is_reflex(self, i: int) -> bool:
        v = self.vertices
        return orient2d(v[(i - 1) % self.n], v[i], v[(i + 1) % self.n]) < 0


def validate_polygon(vertices) -> SimplePolygon:
    """Validate raw vertex input and return the polygon model."""
    return SimplePolygon(vertices)


@dataclass
class Triangulation:
    """Ear-clipping triangulation of a simple polygon.

    triangles[k] is a CCW index triple; diagonals are the n-3 internal edges,
    stored as sorted index pairs in deterministic order.
    """

    poly: SimplePolygon
    triangles: list = field(default_factory=list)
    diagonals: list = field(default_factory=list)

    def __post_init__(self):
        if not self.triangles:
            self.triangles = _ear_clip(self.poly)
        n = self.poly.n
        edge_use = {}
        for t, (a, b, c) in enumerate(self.triangles):
            for e in ((a, b), (b, c), (c, a)):
                key = tuple(sorted(e))
                edge_use.setdefault(key, []).append(t)
        boundary = {tuple(sorted((i, (i + 1) % n))) for i in range(n)}
        self.diagonals = sorted(k for k in edge_use if k not in boundary)
        self._edge_use = edge_use
        self.neighbors = [[] for _ in self.triangles]
        for key, tris in edge_use.items():
            if len(tris) == 2:
                self.neighbors[tris[0]].append((key, tris[1]))
                self.neighbors[tris[1]].append((key, tris[0]))
        self._tri_pts = np.array([[self.poly.vertices[i] for i in tri] for tri in self.triangles])

    def triangles_at_vertex(self, v: int) -> list:
        return [t for t, tri in enumerate(self.triangles) if v in tri]

    def triangles_with_edge(self, key) -> list:
        return self._edge_use.get(tuple(sorted(key)), [])

    def adjacent(self, t1: int, t2: int) -> bool:
        return any(o == t2 for _, o in self.neighbors[t1])

    def triangle_points(self, t: int) -> np.ndarray:
        return self._tri_pts[t]

    def locate(self, p) -> int:
        """Index of the triangle containing p (closed); ties resolve to the lowest id."""
        px, py = float(p[0]), float(p[1])
        eps = self.poly.eps
        A = self._tri_pts[:, 0]
        B = self._tri_pts[:, 1]
        C = self._tri_pts[:, 2]

        def side(P, Q):
            d = Q - P
            L = np.hypot(d[:, 0], d[:, 1])
            return ((px - P[:, 0]) * d[:, 1] - (py - P[:, 1]) * d[:, 0]) / np.maximum(L, 1e-300)

        # CCW triangles: interior lies to the left of every edge (side <= 0)
        inside = (side(A, B) <= eps) & (side(B, C) <= eps) & (side(C, A) <= eps)
        idx = np.nonzero(inside)[0]
        if len(idx) == 0:
            raise OutsidePolygon(f"point {p} is not in any triangle")
        return int(idx[0])


def _ear_clip(poly: SimplePolygon) -> list:
    """Deterministic O(n^2) ear clipping; clips the lowest-index valid ear each round."""
    v = poly.vertices
    idx = list(range(poly.n))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 4 * poly.n * poly.n:
            raise PolygonError("ear clipping failed to converge (degenerate input?)")
        clipped = False
        for k in range(len(idx)):
            ip, ic, inx = idx[k - 1], idx[k], idx[(k + 1) % len(idx)]
            a, b, c = v[ip], v[ic], v[inx]
            if orient2d(a, b, c) <= 0:
                continue  # reflex or collinear corner
            ok = True
            for j in idx:
                if j in (ip, ic, inx):
                    continue
                q = v[j]
                # any remaining vertex inside or on the candidate ear blocks it
                if orient2d(a, b, q) >= 0 and orient2d(b, c, q) >= 0 and orient2d(c, a, q) >= 0:
                    ok = False
                    break
            if ok:
                tris.append((ip, ic, inx))
                idx.pop(k)
                clipped = True
                break
        if not clipped:
            raise PolygonError("no ear found; polygon may be degenerate")
    tris.append(tuple(idx))
    # normalize to CCW triples
    out = []
    for (a, b, c) in tris:
        if orient2d(v[a], v[b], v[c]) < 0:
            a, b, c = a, c, b
        out.append((a, b, c))
    return out


def triangulate(poly: SimplePolygon) -> Triangulation:
    return Triangulation(poly)
