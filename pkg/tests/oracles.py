"""Independent measurement oracles used by the test suite.

GridGeodesic approximates geodesic distances by Dijkstra over a dense pixel
graph: nodes are grid points inside the polygon, edges are coprime integer
steps up to +/-6 pitches, and every edge near the boundary is verified with
exact GEOS predicates (deep edges are validated by a clearance bound). Query
endpoints are linked directly into the graph, so the only systematic error is
the direction discretization of the step set, which stays under two pitches
at 400 divisions. None of this shares code with the visibility-graph engine.
"""
from __future__ import annotations

import math

import numpy as np
import shapely
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra
from shapely.geometry import Polygon as ShapelyPolygon


def _offsets(reach: int):
    """Half set of coprime step directions; the graph is used undirected."""
    out = []
    for dx in range(-reach, reach + 1):
        for dy in range(0, reach + 1):
            if dy == 0 and dx <= 0:
                continue
            if math.gcd(abs(dx), dy) != 1:
                continue
            out.append((dx, dy))
    return out


class GridGeodesic:
    """Dense-grid Dijkstra oracle for geodesic distances in a simple polygon."""

    def __init__(self, vertices, divisions: int = 400, reach: int = 6):
        v = np.asarray(vertices, float)
        self.poly = ShapelyPolygon(v)
        shapely.prepare(self.poly)
        dx = v[:, 0][:, None] - v[:, 0][None, :]
        dy = v[:, 1][:, None] - v[:, 1][None, :]
        self.diameter = float(np.hypot(dx, dy).max())
        self.pitch = self.diameter / divisions
        self.reach = reach

        xmin, ymin, xmax, ymax = self.poly.bounds
        self._x0, self._y0 = xmin, ymin
        xs = xmin + np.arange(int((xmax - xmin) / self.pitch) + 2) * self.pitch
        ys = ymin + np.arange(int((ymax - ymin) / self.pitch) + 2) * self.pitch
        XX, YY = np.meshgrid(xs, ys, indexing="ij")
        inside = shapely.intersects_xy(self.poly, XX.ravel(), YY.ravel())
        inside = inside.reshape(XX.shape)
        ids = np.full(XX.shape, -1, dtype=np.int64)
        self.n_grid = int(inside.sum())
        ids[inside] = np.arange(self.n_grid)
        self.ids = ids
        self.nodes = np.column_stack([XX[inside], YY[inside]])
        self.depth = shapely.distance(shapely.points(self.nodes), self.poly.boundary)

        rows, cols, wts = [], [], []
        nx, ny = XX.shape
        for sx, sy in _offsets(reach):
            a = ids[max(0, -sx):min(nx, nx - sx), max(0, -sy):min(ny, ny - sy)]
            b = ids[max(0, sx):min(nx, nx + sx), max(0, sy):min(ny, ny + sy)]
            ok = (a >= 0) & (b >= 0)
            ai, bi = a[ok], b[ok]
            step = math.hypot(sx, sy) * self.pitch
            # a segment shorter than the clearance of one endpoint cannot leave
            deep = self.depth[ai] > step
            keep = deep.copy()
            shallow = np.flatnonzero(~deep)
            if len(shallow):
                segs = np.stack([self.nodes[ai[shallow]], self.nodes[bi[shallow]]], axis=1)
                keep[shallow] = shapely.covers(self.poly, shapely.linestrings(segs))
            rows.append(ai[keep])
            cols.append(bi[keep])
            wts.append(np.full(int(keep.sum()), step))
        self._rows = np.concatenate(rows)
        self._cols = np.concatenate(cols)
        self._wts = np.concatenate(wts)

    def _links(self, p: np.ndarray):
        """Grid nodes reachable from p by a straight covered segment."""
        i0 = int(round((p[0] - self._x0) / self.pitch))
        j0 = int(round((p[1] - self._y0) / self.pitch))
        w = self.reach + 1
        nx, ny = self.ids.shape
        patch = self.ids[max(0, i0 - w):min(nx, i0 + w + 1),
                         max(0, j0 - w):min(ny, j0 + w + 1)]
        cand = patch[patch >= 0]
        if len(cand) == 0:
            raise ValueError(f"no grid nodes near {tuple(p)}")
        segs = np.stack([np.broadcast_to(p, (len(cand), 2)), self.nodes[cand]], axis=1)
        ok = shapely.covers(self.poly, shapely.linestrings(segs))
        ids = cand[ok]
        if len(ids) == 0:
            raise ValueError(f"point {tuple(p)} links to no grid node")
        lens = np.hypot(*(self.nodes[ids] - p).T)
        return ids, lens

    def distances(self, sources, targets) -> np.ndarray:
        """(S, T) matrix of oracle distances between arbitrary interior points."""
        S = np.atleast_2d(np.asarray(sources, float))
        T = np.atleast_2d(np.asarray(targets, float))
        n = self.n_grid
        rows = [self._rows]
        cols = [self._cols]
        wts = [self._wts]
        for k, p in enumerate(np.vstack([S, T])):
            ids, lens = self._links(p)
            rows.append(np.full(len(ids), n + k))
            cols.append(ids)
            wts.append(lens)
        # direct edges for mutually visible pairs keep those exact
        for i, p in enumerate(S):
            segs = np.stack([np.broadcast_to(p, (len(T), 2)), T], axis=1)
            ok = shapely.covers(self.poly, shapely.linestrings(segs))
            for j in np.flatnonzero(ok):
                rows.append(np.array([n + i]))
                cols.append(np.array([n + len(S) + j]))
                wts.append(np.array([float(np.hypot(*(T[j] - p)))]))
        total = n + len(S) + len(T)
        graph = csr_matrix(
            (np.concatenate(wts), (np.concatenate(rows), np.concatenate(cols))),
            shape=(total, total),
        )
        src = np.arange(n, n + len(S))
        D = dijkstra(graph, directed=False, indices=src)
        return D[:, n + len(S):]

    def distance(self, p, q) -> float:
        return float(self.distances([p], [q])[0, 0])


def sample_interior(vertices, rng, count: int, margin: float = 0.0) -> np.ndarray:
    """Uniform rejection sample of interior points, margin away from the wall."""
    poly = ShapelyPolygon(np.asarray(vertices, float))
    shapely.prepare(poly)
    xmin, ymin, xmax, ymax = poly.bounds
    out = []
    while len(out) < count:
        p = rng.uniform((xmin, ymin), (xmax, ymax), size=(64, 2))
        ok = shapely.contains_xy(poly, p[:, 0], p[:, 1])
        if margin > 0.0:
            ok &= shapely.distance(shapely.points(p), poly.boundary) > margin
        out.extend(p[ok])
    return np.asarray(out[:count])


def sample_chain(pts: np.ndarray, closed: bool, count: int) -> np.ndarray:
    """count points spread by arclength along one polyline chain."""
    p = np.asarray(pts, float)
    if closed and len(p) > 2:
        p = np.vstack([p, p[:1]])
    seg = np.hypot(*np.diff(p, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    if cum[-1] <= 0.0:
        return np.repeat(p[:1], count, axis=0)
    s = np.linspace(0.0, cum[-1], count, endpoint=not closed)
    x = np.interp(s, cum, p[:, 0])
    y = np.interp(s, cum, p[:, 1])
    return np.column_stack([x, y])


def sample_chains(chains, count: int) -> np.ndarray:
    """count points spread by arclength across a list of Polyline chains."""
    lens = np.array([c.length for c in chains], float)
    total = lens.sum()
    quota = np.maximum(1, np.round(count * lens / max(total, 1e-300)).astype(int))
    pts = [sample_chain(c.pts, c.closed, k) for c, k in zip(chains, quota)]
    return np.vstack(pts)[:count]
