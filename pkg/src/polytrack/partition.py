"""Face partition of the polygon induced by critical curves, and the
mode-per-face hybrid automaton of the tracking game.

Cells come from polygonizing the union of the polygon boundary with every
region's internal and external curves. Cells are labeled with the set of
guards whose critical region (the band between s_int and s_ext, not the
protected blob) covers them; cells sharing a label form one face/mode. The
unlabeled remainder splits into the external face R_ext -- every unlabeled
component that reaches the polygon boundary -- plus one face per unlabeled
component fully enclosed by critical curves (the protected side of an
annular region). Mode ids are 1-based with R_ext last. The automaton's
discrete input set per mode is {itself} ∪ {adjacent modes}; there are no
discrete disturbances and no continuous control inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from shapely import set_precision
from shapely.geometry import LineString, Point
from shapely.ops import polygonize, unary_union

from .polygon import OutsidePolygon
from .regions import AreaRegion


class DegenerateArrangement(ValueError):
    """Tangential curve overlap destroyed cells beyond tolerance."""


@dataclass(frozen=True)
class Mode:
    id: int
    regions: tuple[int, ...]       # guard ids whose footprint covers the face
    sigma: tuple[int, ...]         # {id} ∪ adjacent mode ids, sorted


@dataclass(frozen=True)
class HybridAutomaton:
    modes: tuple[Mode, ...]
    transitions: tuple[tuple[int, int], ...]   # directed pairs
    external: int | None

    def sigma(self, mode_id: int) -> set[int]:
        for m in self.modes:
            if m.id == mode_id:
                return set(m.sigma)
        raise KeyError(mode_id)

    def to_dict(self) -> dict:
        return {
            "modes": [{"id": m.id, "regions": list(m.regions)} for m in self.modes],
            "transitions": [list(t) for t in self.transitions],
            "external": self.external,
        }


class RegionPartition:
    """Label-grouped faces of the curve-induced subdivision of P."""

    def __init__(self, poly, faces: list[tuple[tuple[int, ...], AreaRegion]],
                 external: int | None):
        self.poly = poly
        self.labels = [lab for lab, _ in faces]       # index = mode id - 1
        self.geoms = [geom for _, geom in faces]
        self.external = external
        self._adj = self._adjacency()

    def _adjacency(self) -> list[set[int]]:
        n = len(self.geoms)
        tol = 1e-7 * self.poly.diameter
        adj = [set() for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                shared = self.geoms[i].geom.boundary.intersection(
                    self.geoms[j].geom.boundary)
                if shared.length > tol:
                    adj[i].add(j + 1)
                    adj[j].add(i + 1)
        return adj

    @property
    def n_faces(self) -> int:
        return len(self.geoms)

    def face_ids(self) -> list[int]:
        return list(range(1, len(self.geoms) + 1))

    def mode_of(self, p) -> int:
        """Containing face id; boundary points resolve to the lowest id."""
        xy = (float(p[0]), float(p[1]))
        for i, geom in enumerate(self.geoms):
            if geom.covers_point(xy):
                return i + 1
        # numeric dust between faces: nearest face
        pt = Point(xy)
        d = [geom.geom.distance(pt) for geom in self.geoms]
        k = int(np.argmin(d))
        if d[k] <= 1e-6 * self.poly.diameter:
            return k + 1
        raise OutsidePolygon(f"point {tuple(p)} lies in no partition face")

    def to_automaton(self) -> HybridAutomaton:
        modes = []
        transitions = []
        for i, lab in enumerate(self.labels):
            mid = i + 1
            sig = tuple(sorted({mid} | self._adj[i]))
            modes.append(Mode(id=mid, regions=tuple(sorted(lab)), sigma=sig))
            for k in sorted(self._adj[i]):
                transitions.append((mid, k))
        return HybridAutomaton(tuple(modes), tuple(transitions), self.external)

    def to_dict(self) -> dict:
        return {
            "faces": [
                {"id": i + 1, "regions": sorted(lab), "loops": geom.to_loops()}
                for i, (lab, geom) in enumerate(zip(self.labels, self.geoms))
            ],
            "external": self.external,
        }


def _stitch(chains: list[np.ndarray], tol: float) -> list[np.ndarray]:
    """Make near-incidences between chains exact so the union nodes them.

    Open-chain endpoints that stop within tol of another chain are snapped to
    the nearest vertex when one is that close, otherwise inserted as a new
    vertex of the segment they rest on. Without this, a curve ending on a
    wall's interior dangles and polygonize drops it.
    """
    chains = [np.asarray(c, float).copy() for c in chains]
    for i, c in enumerate(chains):
        for k in (0, len(c) - 1):
            p = c[k]
            for j, d in enumerate(chains):
                if j == i:
                    continue
                dist = np.sqrt(((d - p) ** 2).sum(axis=1))
                m = int(np.argmin(dist))
                if 0.0 < dist[m] <= tol:
                    c[k] = d[m]
                    p = c[k]
    ends = [c[k] for c in chains for k in (0, -1)]
    out = []
    for c in chains:
        ins: dict[int, list[tuple[float, np.ndarray]]] = {}
        for p in ends:
            if (np.abs(c - p).max(axis=1) == 0.0).any():
                continue  # already a vertex of this chain
            a, b = c[:-1], c[1:]
            ab = b - a
            L2 = (ab ** 2).sum(axis=1)
            t = np.clip(((p - a) * ab).sum(axis=1) / np.where(L2 > 0, L2, 1.0),
                        0.0, 1.0)
            proj = a + t[:, None] * ab
            dist = np.sqrt(((proj - p) ** 2).sum(axis=1))
            s = int(np.argmin(dist))
            if dist[s] <= tol and 0.0 < t[s] < 1.0:
                ins.setdefault(s, []).append((float(t[s]), p.copy()))
        if ins:
            parts = []
            for s in range(len(c) - 1):
                parts.append(c[s:s + 1])
                for _, p in sorted(ins.get(s, []), key=lambda z: z[0]):
                    parts.append(p[None, :])
            parts.append(c[-1:])
            c = np.vstack(parts)
        out.append(c)
    return out


def build_partition(ctx) -> RegionPartition:
    """Subdivide P by all critical curves and group cells by covering label."""
    scn = ctx.scn
    poly = scn.poly
    ring = np.vstack([poly.vertices, poly.vertices[:1]])
    raw = [ring]
    bands = {}
    for info in scn.classification.guards:
        reg = ctx.region(info.idx)
        if reg is None or not reg.components:
            continue
        bands[info.idx] = reg.region.geom
        for chain in reg.s_int + reg.s_ext:
            raw.append(np.asarray(chain.shapely().coords, float))
    lines = [LineString(c) for c in _stitch(raw, 1e-9 * poly.diameter)]
    # snap-round as well: rounding both copies of a stitched vertex keeps the
    # incidence exact and defuses grazing crossings between distinct curves
    merged = set_precision(unary_union(lines), 1e-9 * poly.diameter)
    cells = [c for c in polygonize(merged) if c.area > 0.0]

    groups: dict[tuple[int, ...], list] = {}
    for cell in cells:
        rep = cell.representative_point()
        if not poly.shapely.covers(rep):
            continue
        label = tuple(sorted(
            g for g, band in bands.items() if band.covers(rep)
        ))
        groups.setdefault(label, []).append(cell)

    labels = sorted((lab for lab in groups if lab), key=lambda lab: (lab, len(lab)))
    faces = [(lab, AreaRegion(unary_union(groups[lab]))) for lab in labels]
    external = None
    if () in groups:
        # components sealed off by critical curves become their own faces;
        # everything that reaches the polygon boundary is the external face
        blank = unary_union(groups[()])
        parts = list(blank.geoms) if blank.geom_type.startswith("Multi") else [blank]
        wall_tol = 1e-9 * poly.diameter
        outer = [p for p in parts if p.exterior.distance(poly.shapely.exterior) <= wall_tol]
        inner = [p for p in parts if p.exterior.distance(poly.shapely.exterior) > wall_tol]
        for p in inner:
            faces.append(((), AreaRegion(p)))
        if outer:
            faces.append(((), AreaRegion(unary_union(outer))))
            external = len(faces)
    total = sum(geom.area for _, geom in faces)
    if abs(total - poly.area) > 1e-7 * poly.area:
        raise DegenerateArrangement(
            f"faces cover {total:.17g} of polygon area {poly.area:.17g}")
    return RegionPartition(poly, faces, external)
