"""Critical regions: protected blobs, their internal/external curves, stations.

For a guard with maximum tether d_max = diagonal_length * ratio, each protected
blob (union of triangles it alone must cover, or plugged regular-triangle
pieces) contributes one component:

  s_int -- the blob boundary that lies strictly inside the polygon,
  band  -- points outside the blob within geodesic distance d_max of s_int,
  s_ext -- the outer band boundary (neither on the polygon wall nor on s_int).

The relative station of an intruder position p is

  f(p) = clamp(d_geo(p, s_ext) / d_max)  when p is in blob + band, else 0,

which is 0 beyond the band, 1 on the blob, and 1/d_max-Lipschitz in geodesic
distance in between, so a guard moving at full speed can always realize it.
When the band exhausts the reachable side (no s_ext exists), the station is
pinned to 1 on that side.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from shapely.geometry import MultiLineString, Point, Polygon as ShapelyPolygon
from shapely.ops import unary_union

from .geodesic import CurveField, GeodesicEngine
from .offsets import VisibilityCache, geodesic_disc
from .polygon import SimplePolygon, Triangulation
from .primitives import EPS_ARC_REL
from .regions import AreaRegion, Polyline


def triangles_geom(tri: Triangulation, tids) -> ShapelyPolygon:
    """Exact union of triangulation triangles (empty geometry for no ids)."""
    polys = [ShapelyPolygon(tri.triangle_points(t)) for t in sorted(tids)]
    if not polys:
        return ShapelyPolygon()
    return unary_union(polys)


def _rings(geom):
    if geom.is_empty:
        return
    parts = geom.geoms if geom.geom_type.startswith("Multi") else [geom]
    for part in parts:
        if part.geom_type != "Polygon":
            continue
        yield np.asarray(part.exterior.coords)
        for hole in part.interiors:
            yield np.asarray(hole.coords)


def _ring_chains(ring: np.ndarray, keep) -> list[Polyline]:
    """Maximal runs of kept ring segments, merged across the ring seam."""
    m = len(ring) - 1   # ring is closed: last == first
    kept = [bool(keep(0.5 * (ring[i] + ring[i + 1]))) for i in range(m)]
    if all(kept):
        return [Polyline(ring[:-1], closed=True)]
    if not any(kept):
        return []
    # rotate so the ring starts on a dropped segment, then collect runs
    start = kept.index(False)
    idx = [(start + i) % m for i in range(m)]
    chains, run = [], []
    for i in idx:
        if kept[i]:
            if not run:
                run = [ring[i]]
            run.append(ring[i + 1])
        elif run:
            chains.append(Polyline(np.asarray(run)))
            run = []
    if run:
        chains.append(Polyline(np.asarray(run)))
    return chains


def internal_chains(poly: SimplePolygon, geom) -> list[Polyline]:
    """Boundary pieces of geom that do not lie on the polygon wall."""
    tol = 1e-7 * poly.diameter
    out = []
    for ring in _rings(geom):
        out.extend(_ring_chains(ring, lambda mid: poly.boundary_distance(mid) > tol))
    return out


@dataclass
class CriticalComponent:
    s_int: list[Polyline]
    s_ext: list[Polyline]
    inner: AreaRegion
    band: AreaRegion
    field_ext: CurveField | None   # None when the band saturates the side
    d_max: float

    def station(self, p) -> float:
        if self.inner.covers_point(p):
            return 1.0
        if not self.band.covers_point(p):
            return 0.0
        if self.field_ext is None:
            return 1.0
        return float(np.clip(self.field_ext.distance(p) / self.d_max, 0.0, 1.0))


@dataclass
class CriticalRegion:
    guard: int
    endpoint: int            # 0 or 1: diagonal endpoint the region is anchored to
    d_max: float
    components: list[CriticalComponent]
    region: AreaRegion       # union of bands
    inner: AreaRegion        # union of protected blobs

    def station(self, p) -> float:
        """Relative station in [0, 1]; 1 means the guard must sit at its anchor."""
        return max((c.station(p) for c in self.components), default=0.0)

    def absolute_station(self, p) -> float:
        """Position along the diagonal as a fraction from endpoint 0 to 1."""
        s = self.station(p)
        return s if self.endpoint == 1 else 1.0 - s

    @property
    def s_int(self) -> list[Polyline]:
        return [c for comp in self.components for c in comp.s_int]

    @property
    def s_ext(self) -> list[Polyline]:
        return [c for comp in self.components for c in comp.s_ext]


def build_region(engine: GeodesicEngine, cache: VisibilityCache, guard: int,
                 endpoint: int, blobs, d_max: float) -> CriticalRegion:
    """Assemble the critical region for one guard from its protected blobs."""
    poly = engine.poly
    inner_all = unary_union([b for b in blobs if not b.is_empty])
    if inner_all.is_empty:
        return CriticalRegion(guard, endpoint, d_max, [], AreaRegion.empty(),
                              AreaRegion.empty())
    side = poly.shapely.difference(inner_all)
    arc_tol = EPS_ARC_REL * poly.diameter
    wall_tol = 1e-7 * poly.diameter

    parts = inner_all.geoms if inner_all.geom_type.startswith("Multi") else [inner_all]
    comps = []
    all_sint = []
    for part in parts:
        chains = internal_chains(poly, part)
        if not chains:
            raise ValueError(f"protected blob of guard {guard} has no interior boundary")
        all_sint.append((part, chains))
    sint_lines = MultiLineString(
        [c.pts.tolist() for _, chains in all_sint for c in chains]
    )
    sint_tol = max(4.0 * poly.eps, min(1e-6 * poly.diameter, 0.1 * d_max))

    for part, chains in all_sint:
        field_int = CurveField(engine, chains)
        disc = geodesic_disc(field_int, d_max, cache, arc_tol)
        band = disc.intersection(side)
        ext_chains = []
        for ring in _rings(band):
            ext_chains.extend(_ring_chains(
                ring,
                lambda mid: (poly.boundary_distance(mid) > wall_tol
                             and sint_lines.distance(Point(mid)) > sint_tol),
            ))
        field_ext = CurveField(engine, ext_chains) if ext_chains else None
        comps.append(CriticalComponent(
            s_int=chains, s_ext=ext_chains,
            inner=AreaRegion(part), band=AreaRegion(band),
            field_ext=field_ext, d_max=d_max,
        ))

    region = AreaRegion(unary_union([c.band.geom for c in comps]))
    return CriticalRegion(guard, endpoint, d_max, comps, region, AreaRegion(inner_all))
