"""Geodesic shortest paths and distances via the vertex visibility graph.

Paths inside a simple polygon bend only at (reflex) polygon vertices, so
point-to-point, point-to-curve and curve-to-curve distances reduce to Dijkstra
over the vertex graph plus direct-visibility candidates (perpendicular feet
and chain joints for curves). No discretization is involved; these values are
exact up to floating point.
"""
from __future__ import annotations

import heapq
from functools import cached_property

import numpy as np

from .polygon import OutsidePolygon, SimplePolygon
from .regions import Polyline
from .visibility import visible, visible_many


class GeodesicEngine:
    """Shared per-polygon visibility/distance structures."""

    def __init__(self, poly: SimplePolygon):
        self.poly = poly

    @cached_property
    def vv_visible(self) -> np.ndarray:
        """Boolean (n, n) vertex-to-vertex visibility (closed segments)."""
        n = self.poly.n
        v = self.poly.vertices
        vis = np.eye(n, dtype=bool)
        for i in range(n):
            row = visible_many(self.poly, v[i], v[i + 1:])
            vis[i, i + 1:] = row
            vis[i + 1:, i] = row
        return vis

    @cached_property
    def vv_dist(self) -> np.ndarray:
        v = self.poly.vertices
        d = np.hypot(v[:, 0][:, None] - v[:, 0][None, :], v[:, 1][:, None] - v[:, 1][None, :])
        return np.where(self.vv_visible, d, np.inf)

    def _check_inside(self, p):
        if not self.poly.contains(p, tol=1e-7 * self.poly.diameter):
            raise OutsidePolygon(f"point {tuple(p)} is outside the polygon")

    def path(self, p, q) -> tuple[float, np.ndarray]:
        """Geodesic (length, waypoints) from p to q."""
        p = self.poly.snap_inside(np.asarray(p, float))
        q = self.poly.snap_inside(np.asarray(q, float))
        self._check_inside(p)
        self._check_inside(q)
        if visible_many(self.poly, p, q[None, :])[0]:
            return float(np.hypot(*(q - p))), np.vstack([p, q])
        v = self.poly.vertices
        vis_p = visible_many(self.poly, p, v)
        vis_q = visible_many(self.poly, q, v)
        dp = np.where(vis_p, np.hypot(v[:, 0] - p[0], v[:, 1] - p[1]), np.inf)
        dq = np.where(vis_q, np.hypot(v[:, 0] - q[0], v[:, 1] - q[1]), np.inf)
        dist, pred = _dijkstra(self.vv_dist, dp)
        total = dist + dq
        k = int(np.argmin(total))
        if not np.isfinite(total[k]):
            raise OutsidePolygon("no geodesic path found (disconnected input?)")
        chain = [k]
        while pred[chain[-1]] >= 0:
            chain.append(pred[chain[-1]])
        chain.reverse()
        pts = np.vstack([p, v[chain], q])
        return float(total[k]), pts

    def distance(self, p, q) -> float:
        return self.path(p, q)[0]


def _dijkstra(w: np.ndarray, init: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dijkstra over a dense weight matrix with per-node source offsets."""
    n = len(init)
    dist = init.astype(float).copy()
    pred = np.full(n, -1, dtype=int)
    done = np.zeros(n, bool)
    heap = [(d, i) for i, d in enumerate(dist) if np.isfinite(d)]
    heapq.heapify(heap)
    while heap:
        d, i = heapq.heappop(heap)
        if done[i] or d > dist[i]:
            continue
        done[i] = True
        row = w[i]
        for j in np.nonzero(np.isfinite(row))[0]:
            nd = d + row[j]
            if nd < dist[j] - 1e-15:
                dist[j] = nd
                pred[j] = i
                heapq.heappush(heap, (nd, j))
    return dist, pred


class CurveField:
    """Geodesic distance field to a fixed set of polyline sources.

    Precomputes exact vertex weights (geodesic distance from every polygon
    vertex to the curve set); point queries then need only direct-visibility
    candidates plus one pass over visible vertices.
    """

    def __init__(self, engine: GeodesicEngine, curves: list[Polyline]):
        self.engine = engine
        self.poly = engine.poly
        self.curves = [c for c in curves if len(c.pts) >= 1]
        segs0, segs1 = [], []
        for c in self.curves:
            if len(c.pts) == 1:
                segs0.append(c.pts[0])
                segs1.append(c.pts[0])
            else:
                a, b = c.segments()
                segs0.append(a)
                segs1.append(b)
        if not segs0:
            raise ValueError("empty curve set")
        self.P0 = np.vstack([np.atleast_2d(s) for s in segs0])
        self.P1 = np.vstack([np.atleast_2d(s) for s in segs1])
        self._D = self.P1 - self.P0
        self._L2 = np.maximum(np.sum(self._D * self._D, axis=1), 1e-300)

    def _feet(self, p) -> np.ndarray:
        t = np.clip(((p - self.P0) * self._D).sum(axis=1) / self._L2, 0.0, 1.0)
        return self.P0 + t[:, None] * self._D

    def direct_distance(self, p, return_foot: bool = False):
        """Min |p - c| over curve points c with the segment pc inside the polygon."""
        p = self.poly.snap_inside(np.asarray(p, float))
        feet = self._feet(p)
        d = np.hypot(feet[:, 0] - p[0], feet[:, 1] - p[1])
        order = np.argsort(d, kind="stable")
        vis = visible_many(self.poly, p, feet[order])
        for rank, ok in enumerate(vis):
            if ok:
                k = order[rank]
                return (float(d[k]), feet[k]) if return_foot else float(d[k])
        return (np.inf, None) if return_foot else np.inf

    @cached_property
    def vertex_weights(self) -> np.ndarray:
        v = self.poly.vertices
        init = np.array([self.direct_distance(v[i]) for i in range(self.poly.n)])
        dist, pred = _dijkstra(self.engine.vv_dist, init)
        self._pred = pred
        return dist

    def distance(self, p) -> float:
        p = self.poly.snap_inside(np.asarray(p, float))
        direct = self.direct_distance(p)
        w = self.vertex_weights
        v = self.poly.vertices
        dv = np.hypot(v[:, 0] - p[0], v[:, 1] - p[1])
        cand = dv + w
        order = np.argsort(cand, kind="stable")
        best = direct
        todo = [i for i in order if cand[i] < best]
        if todo:
            vis = visible_many(self.poly, p, v[todo])
            for i, ok in zip(todo, vis):
                if ok and cand[i] < best:
                    best = cand[i]
                    break  # candidates sorted ascending; first visible wins
        return float(best)

    def path(self, p) -> tuple[float, np.ndarray]:
        """Geodesic (length, waypoints) from p to the nearest curve point."""
        p = np.asarray(p, float)
        direct, foot = self.direct_distance(p, return_foot=True)
        w = self.vertex_weights
        v = self.poly.vertices
        dv = np.hypot(v[:, 0] - p[0], v[:, 1] - p[1])
        cand = dv + w
        order = np.argsort(cand, kind="stable")
        best, best_vertex = direct, -1
        for i in order:
            if cand[i] >= best:
                break
            if visible_many(self.poly, p, v[i][None, :])[0]:
                best, best_vertex = cand[i], int(i)
                break
        if not np.isfinite(best):
            raise OutsidePolygon("no path to curve")
        if best_vertex < 0:
            return float(best), np.vstack([p, foot])
        chain = [best_vertex]
        while self._pred[chain[-1]] >= 0:
            chain.append(int(self._pred[chain[-1]]))
        _, exit_foot = self.direct_distance(v[chain[-1]], return_foot=True)
        pts = np.vstack([p, v[chain], exit_foot])
        return float(best), pts


def curve_to_curve(f1: CurveField, f2: CurveField) -> tuple[float, np.ndarray]:
    """Min geodesic distance between two curve sets, with a realizing path."""
    best = np.inf
    best_path = None
    joints1 = np.vstack([c.pts for c in f1.curves])
    joints2 = np.vstack([c.pts for c in f2.curves])
    for j in joints2:
        d, pts = _try(f1, j)
        if d < best:
            best, best_path = d, pts[::-1]
    for j in joints1:
        d, pts = _try(f2, j)
        if d < best:
            best, best_path = d, pts
    w = f1.vertex_weights + f2.vertex_weights
    k = int(np.argmin(w))
    if w[k] < best:
        _, p1 = f1.path(f1.poly.vertices[k])
        _, p2 = f2.path(f2.poly.vertices[k])
        best = float(w[k])
        best_path = np.vstack([p1[::-1], p2[1:]])
    return float(best), best_path


def _try(field: CurveField, p):
    try:
        return field.path(p)
    except OutsidePolygon:
        return np.inf, None
