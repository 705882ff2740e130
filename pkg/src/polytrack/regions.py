"""Polyline and area-region value types, thin wrappers over shapely set ops."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import shapely
import shapely.prepared
from shapely.geometry import LineString, MultiPolygon, Polygon as ShapelyPolygon
from shapely.ops import unary_union

from .primitives import polyline_length


@dataclass(frozen=True)
class Polyline:
    """Ordered planar chain; closed chains repeat no vertex (the wrap is implicit)."""

    pts: np.ndarray
    closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "pts", np.asarray(self.pts, float).reshape(-1, 2))

    @property
    def length(self) -> float:
        L = polyline_length(self.pts)
        if self.closed and len(self.pts) > 2:
            L += float(np.hypot(*(self.pts[0] - self.pts[-1])))
        return L

    def segments(self):
        """(P0, P1) arrays of the chain's segments."""
        p = self.pts
        if self.closed and len(p) > 2:
            return p, np.roll(p, -1, axis=0)
        return p[:-1], p[1:]

    def shapely(self) -> LineString:
        p = self.pts
        if self.closed and len(p) > 2:
            p = np.vstack([p, p[:1]])
        return LineString(p)

    def to_lists(self):
        return [[float(x), float(y)] for x, y in self.pts]


def polylines_from_shapely(geom) -> list[Polyline]:
    """Decompose a shapely line geometry into open Polyline chains."""
    out = []
    if geom.is_empty:
        return out
    geoms = getattr(geom, "geoms", [geom])
    for g in geoms:
        if g.geom_type == "LineString":
            pts = np.asarray(g.coords, float)
            if len(pts) >= 2:
                closed = bool(np.allclose(pts[0], pts[-1])) and len(pts) > 3
                out.append(Polyline(pts[:-1] if closed else pts, closed=closed))
        elif g.geom_type == "MultiLineString":
            out.extend(polylines_from_shapely(g))
    return out


class AreaRegion:
    """A closed 2-D region (possibly several components with holes)."""

    def __init__(self, geom):
        if isinstance(geom, AreaRegion):
            geom = geom.geom
        if not isinstance(geom, (ShapelyPolygon, MultiPolygon)):
            geom = unary_union(geom) if geom else ShapelyPolygon()
        if geom.geom_type == "GeometryCollection":
            polys = [g for g in geom.geoms if g.geom_type in ("Polygon", "MultiPolygon")]
            geom = unary_union(polys) if polys else ShapelyPolygon()
        self.geom = geom

    @classmethod
    def empty(cls) -> "AreaRegion":
        return cls(ShapelyPolygon())

    @classmethod
    def from_loops(cls, loops) -> "AreaRegion":
        """Even-odd reconstruction: a loop inside another cuts a hole."""
        geom = ShapelyPolygon()
        for lp in loops:
            if len(lp) >= 3:
                geom = geom.symmetric_difference(ShapelyPolygon(lp).buffer(0))
        return cls(geom)

    @property
    def area(self) -> float:
        return float(self.geom.area)

    @property
    def is_empty(self) -> bool:
        return self.geom.is_empty or self.geom.area == 0.0

    def components(self) -> list[ShapelyPolygon]:
        if self.geom.is_empty:
            return []
        if self.geom.geom_type == "Polygon":
            return [self.geom]
        return [g for g in self.geom.geoms if g.geom_type == "Polygon" and g.area > 0]

    def covers_point(self, p, tol: float = 0.0) -> bool:
        pt = shapely.Point(p[0], p[1])
        prep = self.__dict__.get("_prep")
        if prep is None:
            prep = self.__dict__["_prep"] = shapely.prepared.prep(self.geom)
        if prep.covers(pt):
            return True
        return tol > 0.0 and self.geom.distance(pt) <= tol

    def to_loops(self) -> list[list[list[float]]]:
        """Outer/inner boundary loops of every component (holes follow their shell)."""
        loops = []
        for comp in self.components():
            loops.append([[float(x), float(y)] for x, y in comp.exterior.coords[:-1]])
            for ring in comp.interiors:
                loops.append([[float(x), float(y)] for x, y in ring.coords[:-1]])
        return loops


def region_boolean(op: str, a: AreaRegion, b: AreaRegion) -> AreaRegion:
    """Regularized boolean over regions: op in {union, intersection, difference}."""
    ga, gb = a.geom, b.geom
    if op == "union":
        return AreaRegion(ga.union(gb))
    if op == "intersection":
        return AreaRegion(ga.intersection(gb))
    if op == "difference":
        return AreaRegion(ga.difference(gb))
    raise ValueError(f"unknown boolean op: {op}")
