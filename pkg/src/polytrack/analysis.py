"""Scenario orchestration: regions per speed ratio and unsafe-point witnesses.

A Scenario owns the ratio-independent structures (triangulation, guard
classification, visibility caches). An AnalysisContext materializes, for one
speed ratio r, every guard's critical region plus the witness search:

  (a) a guard with unsafe zones at both diagonal endpoints fails when its
      critical region reaches the resting-side unsafe zone; existence is
      decided exactly via the geodesic gap between s_int and that zone's
      boundary (gap < diagonal_length * r), so threshold searches in r are
      crisp rather than limited by area tolerances;
  (b) a regular triangle fails when the pull regions of all its coverers
      (the areas whose entry drags the coverer away from this triangle)
      share more than one point inside it.

Triangles protected by a coverer's own region construction (the plugged
regular fans of that guard) cannot produce case-(b) witnesses: the plugged
piece lies inside the coverer's protected blob by construction, so they are
skipped rather than recomputed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from shapely.geometry import Polygon as ShapelyPolygon

from .critical import CriticalRegion, build_region, internal_chains, triangles_geom
from .geodesic import CurveField, GeodesicEngine, curve_to_curve
from .guards import Classification, classify, validate_guard_set
from .offsets import VisibilityCache
from .polygon import SimplePolygon, Triangulation, triangulate
from .primitives import EPS_AREA_REL, EPS_LEN_REL
from .regions import Polyline, polylines_from_shapely


@dataclass(frozen=True)
class Witness:
    point: tuple[float, float]
    cause: str                  # UnsafePairOverlap | RegularTriangleOverlap
    triangle: int
    guards: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "point": [float(self.point[0]), float(self.point[1])],
            "cause": self.cause,
            "guards": list(self.guards),
        }


class Scenario:
    """A polygon with validated diagonal guards; ratio-independent caches."""

    def __init__(self, poly: SimplePolygon, guards, name: str | None = None):
        self.poly = poly
        self.name = name
        self.tri: Triangulation = triangulate(poly)
        self.guards = validate_guard_set(self.tri, guards)
        self.engine = GeodesicEngine(poly)
        self.cache = VisibilityCache(poly)
        self._contexts: dict[float, "AnalysisContext"] = {}

    @cached_property
    def classification(self) -> Classification:
        return classify(self.tri, self.guards)

    def guard_length(self, g: int) -> float:
        return self.classification.guards[g].length

    def context(self, ratio: float) -> "AnalysisContext":
        ratio = float(ratio)
        ctx = self._contexts.get(ratio)
        if ctx is None:
            ctx = AnalysisContext(self, ratio)
            self._contexts[ratio] = ctx
        return ctx

    def blob_boundary_field(self, tids) -> CurveField:
        """Distance field to the full boundary of a triangle-union blob."""
        geom = triangles_geom(self.tri, tids)
        rings = []
        parts = geom.geoms if geom.geom_type.startswith("Multi") else [geom]
        for part in parts:
            rings.append(Polyline(np.asarray(part.exterior.coords)[:-1], closed=True))
            for hole in part.interiors:
                rings.append(Polyline(np.asarray(hole.coords)[:-1], closed=True))
        return CurveField(self.engine, rings)


class AnalysisContext:
    """All ratio-dependent constructions for one speed ratio."""

    def __init__(self, scenario: Scenario, ratio: float):
        if ratio <= 0.0:
            raise ValueError("speed ratio must be positive")
        self.scn = scenario
        self.ratio = float(ratio)
        self._regions: dict[int, CriticalRegion | None] = {}
        self._building: set[int] = set()

    def d_max(self, g: int) -> float:
        return self.scn.guard_length(g) * self.ratio

    def region(self, g: int) -> CriticalRegion | None:
        """Critical region of guard g (None for pinned guards); built lazily."""
        if g in self._regions:
            return self._regions[g]
        if g in self._building:
            raise RuntimeError(f"cyclic region dependency through guard {g}")
        scn = self.scn
        info = scn.classification.guards[g]
        if info.gtype == 0:
            self._regions[g] = None
            return None
        self._building.add(g)
        try:
            e = info.region_endpoint
            blobs = []
            if info.zone_U[e]:
                blobs.append(triangles_geom(scn.tri, info.zone_U[e]))
            for t in sorted(info.zone_R[e]):
                piece = ShapelyPolygon(scn.tri.triangle_points(t))
                for (h, f) in scn.classification.options[t]:
                    if h == g:
                        continue
                    piece = piece.intersection(self.pull(h, f))
                    if piece.is_empty:
                        break
                if not piece.is_empty and piece.area > 0.0:
                    blobs.append(piece)
            reg = build_region(scn.engine, scn.cache, g, e, blobs, self.d_max(g))
        finally:
            self._building.discard(g)
        self._regions[g] = reg
        return reg

    def pull(self, h: int, f: int):
        """Intruder positions that drag guard h away from endpoint f.

        Only the resting endpoint is ever queried: a regular triangle's
        coverage option from a guard's region endpoint implies the guard
        protects that triangle itself (plugged), which stable classification
        resolves before regions are built.
        """
        info = self.scn.classification.guards[h]
        if f != info.rest_endpoint:
            raise AssertionError(
                f"pull queried at guard {h} endpoint {f}; expected rest endpoint"
            )
        reg = self.region(h)
        return reg.region.geom.union(reg.inner.geom)

    def dual_zone_gap(self, g: int) -> tuple[float, np.ndarray | None]:
        """Geodesic gap between guard g's s_int and its resting-side unsafe zone."""
        scn = self.scn
        info = scn.classification.guards[g]
        k = info.rest_endpoint
        if info.gtype == 0 or not info.zone_U[k]:
            return np.inf, None
        reg = self.region(g)
        chains = reg.s_int
        if not chains:
            return np.inf, None
        f_int = CurveField(scn.engine, chains)
        f_urest = scn.blob_boundary_field(info.zone_U[k])
        return curve_to_curve(f_int, f_urest)

    def triangle_piece(self, t: int):
        """Joint pull intersection inside regular triangle t (case-b geometry)."""
        piece = ShapelyPolygon(self.scn.tri.triangle_points(t))
        for (h, f) in self.scn.classification.options[t]:
            piece = piece.intersection(self.pull(h, f))
            if piece.is_empty:
                break
        return piece

    @cached_property
    def witnesses(self) -> list[Witness]:
        scn = self.scn
        cls = scn.classification
        out: list[Witness] = []
        area_tol = EPS_AREA_REL * scn.poly.area
        len_tol = EPS_LEN_REL * scn.poly.diameter

        # (a) guards with unsafe zones at both endpoints
        for info in cls.guards:
            g = info.idx
            if info.gtype == 0 or info.region_endpoint is None:
                continue
            k = info.rest_endpoint
            if not info.zone_U[k]:
                continue
            gap, path = self.dual_zone_gap(g)
            if gap < self.d_max(g):
                reg = self.region(g)
                urest = triangles_geom(scn.tri, info.zone_U[k])
                overlap = reg.region.geom.intersection(urest)
                pt = _witness_point(overlap, area_tol, len_tol)
                if pt is None and path is not None:
                    # hairline overlap below area tolerance: nudge the realizing
                    # path's end into the zone
                    end, prev = path[-1], path[-2]
                    d = end - prev
                    n = np.hypot(*d)
                    pt = end + (d / n) * min(1e-3 * scn.poly.diameter, 0.4 * n) \
                        if n > 0 else end
                    if not scn.poly.contains(pt):
                        # path met the zone at a corner; the extension left P
                        pt = end
                if pt is not None:
                    out.append(Witness(
                        point=(float(pt[0]), float(pt[1])),
                        cause="UnsafePairOverlap",
                        triangle=scn.tri.locate(pt),
                        guards=(g,),
                    ))

        # (b) regular triangles whose coverers can all be pulled away at once
        for t, st in enumerate(cls.status):
            if st != "regular":
                continue
            opts = cls.options[t]
            if any(cls.guards[h].region_endpoint == f for (h, f) in opts):
                continue  # plugged by that coverer's own region construction
            piece = self.triangle_piece(t)
            pt = _witness_point(piece, area_tol, len_tol)
            if pt is not None:
                out.append(Witness(
                    point=(float(pt[0]), float(pt[1])),
                    cause="RegularTriangleOverlap",
                    triangle=t,
                    guards=tuple(sorted(h for h, _ in opts)),
                ))
        return out

    @cached_property
    def partition(self):
        from .partition import DegenerateArrangement, build_partition
        try:
            return build_partition(self)
        except DegenerateArrangement:
            # tangential overlap between curves: nudge the ratio once and rebuild
            return build_partition(self.scn.context(self.ratio * (1.0 + 1e-9)))

    @cached_property
    def automaton(self):
        return self.partition.to_automaton()

    @cached_property
    def report(self):
        from .reachability import maximal_invariant_set
        return maximal_invariant_set(self)

    def reactive_stations(self, p) -> list[float]:
        """Absolute station per guard (fraction from endpoint 0 to endpoint 1)."""
        out = []
        for info in self.scn.classification.guards:
            if info.gtype == 0:
                out.append(_pinned_station(info.pinned))
            else:
                out.append(self.region(info.idx).absolute_station(p))
        return out


def _pinned_station(pin) -> float:
    if pin == "free":
        return 0.5
    return float(pin)


def _witness_point(geom, area_tol: float, len_tol: float):
    """Deterministic interior point of an offending intersection, or None.

    Area above tolerance: centroid of the largest component (representative
    point when the centroid falls outside). One-dimensional overlaps longer
    than tolerance: midpoint of the longest piece.
    """
    if geom.is_empty:
        return None
    polys, lines = [], []
    stack = [geom]
    while stack:
        gm = stack.pop()
        if gm.geom_type in ("GeometryCollection", "MultiPolygon", "MultiLineString"):
            stack.extend(gm.geoms)
        elif gm.geom_type == "Polygon" and not gm.is_empty:
            polys.append(gm)
        elif gm.geom_type == "LineString" and not gm.is_empty:
            lines.append(gm)
    total_area = sum(p.area for p in polys)
    if total_area > area_tol:
        comp = max(polys, key=lambda p: p.area)
        c = comp.centroid
        if comp.contains(c):
            return np.asarray(c.coords[0])
        return np.asarray(comp.representative_point().coords[0])
    pieces = lines + [p.exterior for p in polys]
    if pieces:
        longest = max(pieces, key=lambda ln: ln.length)
        if longest.length > len_tol:
            return np.asarray(longest.interpolate(0.5, normalized=True).coords[0])
    return None
