"""Low-level planar primitives: robust orientation, segment tests, tolerances.

Everything downstream works in float64; the only exact computation is the
sign of the 2x2 orientation determinant, which falls back to rational
arithmetic when the floating-point filter is inconclusive.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

# Relative tolerance factors. All geometric epsilons are expressed relative to
# the polygon diameter so that scaled inputs behave identically.
EPS_GEO_REL = 1e-9     # coincidence tolerance
EPS_ARC_REL = 1e-4     # chord tolerance for discretized arcs/offsets
EPS_AREA_REL = 1e-8    # area threshold for "more than one point" (relative to polygon area)
EPS_LEN_REL = 1e-6     # length threshold for 1-D overlaps (relative to diameter)


def orient2d(a, b, c) -> int:
    """Sign of the signed area of triangle (a, b, c): +1 left turn, -1 right, 0 collinear.

    Uses a floating-point filter with a conservative error bound; exact
    rational fallback only when the filter cannot certify the sign.
    """
    ax, ay = a[0], a[1]
    bx, by = b[0], b[1]
    cx, cy = c[0], c[1]
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    # Error bound: machine epsilon times the magnitude of the products involved.
    mag = (abs(bx - ax) + abs(by - ay)) * (abs(cx - ax) + abs(cy - ay))
    err = 8.0 * np.finfo(float).eps * mag
    if det > err:
        return 1
    if det < -err:
        return -1
    if err == 0.0:
        return 0
    # Exact fallback.
    fax, fay = Fraction(ax), Fraction(ay)
    d = (Fraction(bx) - fax) * (Fraction(cy) - fay) - (Fraction(by) - fay) * (Fraction(cx) - fax)
    return (d > 0) - (d < 0)


def seg_point_distance(p, a, b):
    """Euclidean distance from point p to closed segment ab, and the foot parameter."""
    p = np.asarray(p, float)
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    d = b - a
    L2 = float(d @ d)
    if L2 == 0.0:
        return float(np.hypot(*(p - a))), 0.0
    t = float(np.clip((p - a) @ d / L2, 0.0, 1.0))
    foot = a + t * d
    return float(np.hypot(*(p - foot))), t


def segments_properly_cross(a, b, c, d) -> bool:
    """True iff open segments ab and cd cross at a single interior point."""
    o1 = orient2d(a, b, c)
    o2 = orient2d(a, b, d)
    o3 = orient2d(c, d, a)
    o4 = orient2d(c, d, b)
    return o1 * o2 < 0 and o3 * o4 < 0


def polyline_length(pts) -> float:
    pts = np.asarray(pts, float)
    if len(pts) < 2:
        return 0.0
    return float(np.sum(np.hypot(*(np.diff(pts, axis=0).T))))


def dedupe_consecutive(pts, tol: float):
    """Drop consecutive points closer than tol."""
    out = [pts[0]]
    for p in pts[1:]:
        if np.hypot(p[0] - out[-1][0], p[1] - out[-1][1]) > tol:
            out.append(p)
    return np.asarray(out, float)
