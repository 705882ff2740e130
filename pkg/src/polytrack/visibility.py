"""Visibility tests inside a simple polygon.

`visible_many` is the vectorized workhorse used by the geodesic and offset
machinery; ambiguous (grazing) cases fall back to an exact GEOS containment
test on the individual segment. `visibility_polygon` computes the region seen
from a point via a rotational ray sweep with paired offset rays at each vertex
event angle.
"""
from __future__ import annotations

import numpy as np
from shapely.geometry import LineString, Point
from shapely.geometry import Polygon as ShapelyPolygon

from .polygon import SimplePolygon

_CROSS_REL = 1e-12


def visible(poly: SimplePolygon, a, b) -> bool:
    """Closed-segment visibility: True iff segment ab stays within the closed polygon."""
    if np.hypot(a[0] - b[0], a[1] - b[1]) <= poly.eps:
        return poly.contains(a)
    return poly.shapely.covers(LineString([tuple(a), tuple(b)]))


def _wedge_ok(poly: SimplePolygon, vidx: int, dirs: np.ndarray, tol: float) -> np.ndarray:
    """For directions leaving vertex vidx: True where the direction enters the closed wedge."""
    v = poly.vertices
    n = poly.n
    a = v[vidx] - v[(vidx - 1) % n]   # incoming edge direction
    b = v[(vidx + 1) % n] - v[vidx]   # outgoing edge direction
    cb = b[0] * dirs[:, 1] - b[1] * dirs[:, 0]          # cross(b, d)
    ca = dirs[:, 0] * (-a[1]) - dirs[:, 1] * (-a[0])    # cross(d, -a)
    convex = (a[0] * b[1] - a[1] * b[0]) >= 0
    if convex:
        return (cb >= -tol) & (ca >= -tol)
    return (cb >= -tol) | (ca >= -tol)


def visible_many(poly: SimplePolygon, origin, targets) -> np.ndarray:
    """Vectorized closed-segment visibility from one origin to many targets."""
    T = np.atleast_2d(np.asarray(targets, float))
    m = len(T)
    if m == 0:
        return np.zeros(0, bool)
    o = np.asarray(origin, float)
    A, B = poly.edge_arrays
    E = B - A                                  # (n, 2)
    D = T - o                                  # (m, 2)
    seg_len = np.hypot(D[:, 0], D[:, 1])
    edge_len = np.hypot(E[:, 0], E[:, 1])

    # cross(E_j, o - A_j) and cross(E_j, T_i - A_j): sides of the segment endpoints
    w0 = o - A                                 # (n, 2)
    c1 = E[:, 0] * w0[:, 1] - E[:, 1] * w0[:, 0]                       # (n,)
    c2 = (E[:, 0][None, :] * (T[:, 1][:, None] - A[:, 1][None, :])
          - E[:, 1][None, :] * (T[:, 0][:, None] - A[:, 0][None, :]))  # (m, n)
    # cross(D_i, A_j - o) and cross(D_i, B_j - o): sides of the edge endpoints
    c3 = D[:, 0][:, None] * (A[:, 1] - o[1])[None, :] - D[:, 1][:, None] * (A[:, 0] - o[0])[None, :]
    c4 = D[:, 0][:, None] * (B[:, 1] - o[1])[None, :] - D[:, 1][:, None] * (B[:, 0] - o[0])[None, :]

    tol_e = _CROSS_REL * np.maximum(edge_len * edge_len, 1e-300)
    tol_d = _CROSS_REL * np.maximum(seg_len * seg_len, 1e-300)[:, None] + tol_e[None, :]
    zero1 = np.abs(c1)[None, :] <= tol_d
    zero2 = np.abs(c2) <= tol_d
    zero3 = np.abs(c3) <= tol_d
    zero4 = np.abs(c4) <= tol_d

    proper = ((c1[None, :] * c2 < 0) & (c3 * c4 < 0)
              & ~zero1 & ~zero2 & ~zero3 & ~zero4)
    blocked = proper.any(axis=1)

    touchy = (zero1 | zero2 | zero3 | zero4)
    # a zero cross only matters if the segments could actually meet
    boxes_meet = ((np.minimum(o[0], T[:, 0])[:, None] <= np.maximum(A[:, 0], B[:, 0])[None, :] + poly.eps)
                  & (np.maximum(o[0], T[:, 0])[:, None] >= np.minimum(A[:, 0], B[:, 0])[None, :] - poly.eps)
                  & (np.minimum(o[1], T[:, 1])[:, None] <= np.maximum(A[:, 1], B[:, 1])[None, :] + poly.eps)
                  & (np.maximum(o[1], T[:, 1])[:, None] >= np.minimum(A[:, 1], B[:, 1])[None, :] - poly.eps))
    suspicious = (touchy & boxes_meet).any(axis=1) & ~blocked

    out = ~blocked
    # endpoint-at-vertex wedge screening cheaply resolves the most common touches
    if suspicious.any():
        vd = np.hypot(poly.vertices[:, 0] - o[0], poly.vertices[:, 1] - o[1])
        ov = int(np.argmin(vd)) if vd.min() <= poly.eps else -1
        idx = np.nonzero(suspicious)[0]
        if ov >= 0:
            ok = _wedge_ok(poly, ov, D[idx], _CROSS_REL * poly.diameter**2)
            bad = idx[~ok]
            out[bad] = False
            suspicious[bad] = False
            idx = np.nonzero(suspicious)[0]
        for i in idx:
            out[i] = visible(poly, o, T[i])
    return out


def visibility_polygon(poly: SimplePolygon, q, ang_delta: float = 1e-7):
    """Region of the polygon visible from q, as a shapely polygon.

    Rotational sweep: three rays (theta - d, theta, theta + d) per vertex event
    angle; the hit points, sorted by angle and clipped against the polygon,
    bound the visibility region to within ~diameter * ang_delta.
    """
    q = np.asarray(q, float)
    v = poly.vertices
    A, B = poly.edge_arrays
    E = B - A
    eps_r = 2.0 * poly.eps

    base = np.arctan2(v[:, 1] - q[1], v[:, 0] - q[0])
    angles = np.unique(np.concatenate([base - ang_delta, base, base + ang_delta]))
    u = np.stack([np.cos(angles), np.sin(angles)], axis=1)      # (r, 2)

    # ray q + s*u vs edge A + t*E: solve 2x2 per (ray, edge)
    denom = u[:, 0][:, None] * E[:, 1][None, :] - u[:, 1][:, None] * E[:, 0][None, :]
    w = A - q                                                   # (n, 2)
    s_num = w[:, 0][None, :] * E[:, 1][None, :] - w[:, 1][None, :] * E[:, 0][None, :]
    t_num = w[:, 0][None, :] * u[:, 1][:, None] - w[:, 1][None, :] * u[:, 0][:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = s_num / denom
        t = t_num / denom
    valid = (np.abs(denom) > 1e-14) & (t >= -1e-12) & (t <= 1 + 1e-12) & (s > eps_r)
    s = np.where(valid, s, np.inf)
    # collinear edges: ray rides along the edge; nearest endpoint beyond eps_r counts
    par = (np.abs(denom) <= 1e-14) & (np.abs(s_num) <= 1e-9 * poly.diameter)
    if par.any():
        for ri, ei in zip(*np.nonzero(par)):
            for P in (A[ei], B[ei]):
                d = P - q
                sp = d @ u[ri]
                if sp > eps_r and abs(d[0] * u[ri][1] - d[1] * u[ri][0]) <= 1e-9 * poly.diameter:
                    s[ri, ei] = min(s[ri, ei], sp)
    s_hit = s.min(axis=1)
    good = np.isfinite(s_hit)
    pts = q[None, :] + s_hit[good, None] * u[good]
    if len(pts) < 3:
        return ShapelyPolygon()
    region = ShapelyPolygon(pts).buffer(0)
    clipped = region.intersection(poly.shapely)
    if clipped.is_empty:
        return clipped
    if clipped.geom_type == "Polygon":
        return clipped
    # keep the component at q
    qpt = Point(q[0], q[1])
    parts = [g for g in clipped.geoms if g.geom_type == "Polygon"]
    parts.sort(key=lambda g: g.distance(qpt))
    return parts[0] if parts else ShapelyPolygon()
