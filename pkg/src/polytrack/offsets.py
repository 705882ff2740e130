"""Geodesic offset (disc) construction inside a simple polygon.

A geodesic disc of radius d around a curve set is built as a union of
straight-line discs clipped by visibility polygons:

  * sample points on the curves carry the full radius d,
  * polygon vertices v with geodesic curve distance w_v < d carry d - w_v.

Circles are inscribed polygons and curve sampling is dyadic, so the result
under-approximates the true disc by a bounded, controllable amount and the
construction never over-reports reachability.
"""
from __future__ import annotations

import math

import numpy as np
from shapely.geometry import Polygon as ShapelyPolygon, box
from shapely.ops import unary_union

from .geodesic import CurveField
from .polygon import SimplePolygon
from .visibility import visibility_polygon

# fractions of the construction budget spent on circle chords vs curve sampling
_CHORD_FRAC = 0.35
_DENSIFY_FRAC = 0.35
_MAX_CIRCLE_PTS = 1024
_MAX_DYADIC_LEVEL = 9


class VisibilityCache:
    """Visibility polygons keyed by (rounded) viewpoint, shared across builds."""

    def __init__(self, poly: SimplePolygon):
        self.poly = poly
        self._cache: dict[tuple[int, int], object] = {}
        self._quant = 4.0 / poly.eps

    def get(self, p) -> object:
        key = (int(round(p[0] * self._quant)), int(round(p[1] * self._quant)))
        got = self._cache.get(key)
        if got is None:
            got = visibility_polygon(self.poly, np.asarray(p, float))
            self._cache[key] = got
        return got


def _circle(center, radius: float, chord_tol: float) -> ShapelyPolygon:
    """Inscribed regular polygon; vertex count is a power of two times 8."""
    if radius <= 0.0:
        return ShapelyPolygon()
    ratio = min(1.0, max(1e-12, chord_tol / radius))
    alpha = math.acos(1.0 - ratio)
    n = 8
    while n * alpha < math.pi and n < _MAX_CIRCLE_PTS:
        n *= 2
    ang = np.arange(n) * (2.0 * math.pi / n)
    pts = np.column_stack([center[0] + radius * np.cos(ang),
                           center[1] + radius * np.sin(ang)])
    return ShapelyPolygon(pts)


def _curve_samples(field: CurveField, delta: float, eps: float):
    """Dyadic sample points along every curve segment, spacing <= delta."""
    out = []
    for a, b in zip(field.P0, field.P1):
        seg = float(np.hypot(*(b - a)))
        if seg <= 0.0:
            out.append(a)
            continue
        level = 0
        while seg / (1 << level) > delta and level < _MAX_DYADIC_LEVEL:
            level += 1
        k = 1 << level
        ts = np.arange(k + 1) / k
        out.extend(a + np.outer(ts, b - a))
    dedup = {}
    quant = 4.0 / eps
    for p in out:
        dedup[(int(round(p[0] * quant)), int(round(p[1] * quant)))] = p
    return list(dedup.values())


def geodesic_disc(field: CurveField, radius: float, cache: VisibilityCache,
                  arc_tol: float):
    """Union of visibility-clipped discs covering {p : d_geo(p, curves) <= radius}.

    Under-approximates by at most ~arc_tol * (chord + densify fractions).
    """
    poly = cache.poly
    if radius <= 0.0:
        return ShapelyPolygon()
    chord_tol = _CHORD_FRAC * arc_tol
    densify_tol = _DENSIFY_FRAC * arc_tol
    # sample spacing so the sagitta of the lost lens stays within budget:
    # a point midway between samples at distance ~radius loses <= delta^2/(8 radius)
    delta = max(math.sqrt(8.0 * radius * densify_tol), 4.0 * poly.eps)

    gens: list[tuple[np.ndarray, float]] = []
    for p in _curve_samples(field, delta, poly.eps):
        gens.append((p, radius))
    w = field.vertex_weights
    for v_idx, wv in enumerate(w):
        if wv < radius and np.isfinite(wv):
            gens.append((poly.vertices[v_idx], radius - wv))

    pieces = []
    for center, rho in gens:
        disc = _circle(center, rho, chord_tol)
        if disc.is_empty:
            continue
        vis = cache.get(center)
        if vis.is_empty:
            continue
        if vis.covers(box(center[0] - rho, center[1] - rho,
                          center[0] + rho, center[1] + rho)):
            pieces.append(disc)
        else:
            clipped = disc.intersection(vis)
            if not clipped.is_empty:
                pieces.append(clipped)
    if not pieces:
        return ShapelyPolygon()
    out = unary_union(pieces)
    return out.intersection(poly.shapely)
