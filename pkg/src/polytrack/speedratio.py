"""Maximum intruder/guard speed ratio with certificates.

Two independent routes to the threshold:

  * constructive — per dual-zone guard the gap/length ratio (a fixed point in
    r when the guard's internal curves depend on r), and per regular triangle
    the smallest r at which the joint pull intersection meets the triangle
    with more than one point, seeded/ordered by pairwise curve distances;
  * a blind bisection of "witness list empty" over (0, r_hi].

The witness search and every constructive predicate share the same geometry
(`dual_zone_gap`, `triangle_piece`), so the two routes agree to bisection
tolerance; the bisection is still run and reported as a cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from shapely.geometry import Point

from .analysis import Scenario, _witness_point
from .geodesic import CurveField, curve_to_curve
from .primitives import EPS_AREA_REL, EPS_LEN_REL

PROBE_FRAC = 1e-3        # ratio (relative to r_hi) used to materialize
                         # r-independent internal curves
BISECT_TOL_FRAC = 1e-6   # bracket width target, relative to r_hi
SEED_TOL_FRAC = 1e-4     # coarser target for certificate-only pairwise ratios


class NoInternalCurves(ValueError):
    """Raised when a pairwise ratio is requested for a pinned guard."""


@dataclass(frozen=True)
class PairCertificate:
    """One guard with unsafe zones at both endpoints: r = gap / length."""
    guard: int
    ratio: float
    gap: float
    length: float
    path: tuple[tuple[float, float], ...] | None

    def to_dict(self) -> dict:
        return {
            "guard": self.guard,
            "ratio": _num(self.ratio),
            "gap": _num(self.gap),
            "length": self.length,
            "path": None if self.path is None else [list(p) for p in self.path],
        }


@dataclass(frozen=True)
class TriangleCertificate:
    """Smallest r at which all pulls of a regular triangle's coverers meet
    inside it, with the admission order of the coverers."""
    triangle: int
    sequence: tuple[int, ...]
    ratio: float
    seed: tuple[int, int] | None
    seed_ratio: float | None
    seed_path: tuple[tuple[float, float], ...] | None
    witness_point: tuple[float, float] | None

    def to_dict(self) -> dict:
        return {
            "triangle": self.triangle,
            "sequence": list(self.sequence),
            "ratio": _num(self.ratio),
            "seed": None if self.seed is None else list(self.seed),
            "seed_ratio": None if self.seed_ratio is None else _num(self.seed_ratio),
            "witness_point": None if self.witness_point is None
            else list(self.witness_point),
        }


@dataclass
class SpeedRatioResult:
    r_prime: float
    pairs: list[PairCertificate]
    triangles: list[TriangleCertificate]
    r_max: float
    r_bis: float
    r_hi: float
    brackets: list[tuple[float, float]]
    degenerate: bool
    discrepancy: bool

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.r_max)

    def to_dict(self) -> dict:
        return {
            "r_prime": _num(self.r_prime),
            "r_max": _num(self.r_max),
            "r_bis": _num(self.r_bis),
            "r_hi": self.r_hi,
            "unbounded": self.unbounded,
            "degenerate": self.degenerate,
            "discrepancy": self.discrepancy,
            "pairs": [c.to_dict() for c in self.pairs],
            "triangles": [c.to_dict() for c in self.triangles],
            "brackets": [[lo, hi] for (lo, hi) in self.brackets],
        }


def _num(x: float):
    return None if math.isinf(x) else float(x)


def upper_bracket(scn: Scenario) -> float:
    """Beyond diameter/min-length every region saturates its polygon side."""
    return scn.poly.diameter / min(i.length for i in scn.classification.guards)


def _bisect(pred_safe, lo: float, hi: float, tol: float,
            brackets: list | None = None) -> float:
    """Last r with pred_safe true, given pred_safe(lo) and not pred_safe(hi)."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred_safe(mid):
            lo = mid
        else:
            hi = mid
        if brackets is not None:
            brackets.append((lo, hi))
    return 0.5 * (lo + hi)


def _witness_tols(scn: Scenario) -> tuple[float, float]:
    return EPS_AREA_REL * scn.poly.area, EPS_LEN_REL * scn.poly.diameter


def ratio_unsafe_pairs(scn: Scenario) -> tuple[float, list[PairCertificate]]:
    """r' = min over dual-zone guards of gap/length; +inf when none exist."""
    r_hi = upper_bracket(scn)
    probe = PROBE_FRAC * r_hi
    tol = BISECT_TOL_FRAC * r_hi
    certs: list[PairCertificate] = []
    for info in scn.classification.guards:
        g = info.idx
        if info.gtype == 0 or not info.zone_U[info.rest_endpoint]:
            continue
        if info.gtype == 1:
            # internal curves do not depend on r: one exact gap measurement
            gap, path = scn.context(probe).dual_zone_gap(g)
            ratio = gap / info.length
        else:
            def safe(r: float, g=g, l=info.length) -> bool:
                return scn.context(r).dual_zone_gap(g)[0] >= l * r
            if safe(r_hi):
                ratio, gap, path = math.inf, math.inf, None
            else:
                lo = probe
                if not safe(lo):
                    lo = tol
                ratio = _bisect(safe, lo, r_hi, tol)
                gap, path = scn.context(ratio).dual_zone_gap(g)
        certs.append(PairCertificate(
            guard=g, ratio=ratio, gap=gap, length=info.length,
            path=None if path is None else tuple(map(tuple, np.asarray(path))),
        ))
    r_prime = min((c.ratio for c in certs), default=math.inf)
    return r_prime, certs


def _sint_field(ctx, g: int) -> CurveField | None:
    reg = ctx.region(g)
    if reg is None:
        raise NoInternalCurves(f"guard {g} is pinned and has no internal curves")
    chains = reg.s_int
    if not chains:
        return None
    return CurveField(ctx.scn.engine, chains)


def pairwise_ratio(scn: Scenario, g1: int, g2: int,
                   tol_frac: float = BISECT_TOL_FRAC):
    """Joint ratio of two guards: curve gap over summed lengths.

    Returns (ratio, path). When either guard's internal curves grow with r
    the fixed point gap(r) = r*(l1+l2) is bisected.
    """
    cls = scn.classification
    i1, i2 = cls.guards[g1], cls.guards[g2]
    lsum = i1.length + i2.length
    r_hi = upper_bracket(scn)
    probe = PROBE_FRAC * r_hi
    tol = tol_frac * r_hi

    def gap_at(r: float):
        ctx = scn.context(r)
        f1, f2 = _sint_field(ctx, g1), _sint_field(ctx, g2)
        if f1 is None or f2 is None:
            return math.inf, None
        return curve_to_curve(f1, f2)

    if i1.gtype == 1 and i2.gtype == 1:
        gap, path = gap_at(probe)
        return gap / lsum, path

    def safe(r: float) -> bool:
        return gap_at(r)[0] >= lsum * r

    if safe(r_hi):
        return math.inf, None
    lo = probe
    if not safe(lo):
        lo = tol
    ratio = _bisect(safe, lo, r_hi, tol)
    return ratio, gap_at(ratio)[1]


def _plugged(cls, t: int) -> bool:
    return any(cls.guards[h].region_endpoint == f for (h, f) in cls.options[t])


def triangle_ratio(scn: Scenario, t: int) -> TriangleCertificate:
    """Smallest r at which the joint pull intersection meets triangle t with
    more than one point; coverers ordered by pairwise joining ratios."""
    cls = scn.classification
    if cls.status[t] != "regular":
        raise ValueError(f"triangle {t} is {cls.status[t]}, not regular")
    hs = sorted({h for h, _ in cls.options[t]})
    r_hi = upper_bracket(scn)
    tol = BISECT_TOL_FRAC * r_hi
    area_tol, len_tol = _witness_tols(scn)

    pair_r: dict[tuple[int, int], tuple[float, object]] = {}
    for a, b in combinations(hs, 2):
        pair_r[(a, b)] = pairwise_ratio(scn, a, b, tol_frac=SEED_TOL_FRAC)

    seed = seed_ratio = seed_path = None
    sequence = list(hs)
    finite = {p: v for p, v in pair_r.items() if math.isfinite(v[0])}
    if finite:
        seed = min(finite, key=lambda p: finite[p][0])
        seed_ratio, seed_path = finite[seed]
        sequence = list(seed)
        while len(sequence) < len(hs):
            rest = [h for h in hs if h not in sequence]
            join = {
                h: min((pair_r[tuple(sorted((h, s)))][0] for s in sequence),
                       default=math.inf)
                for h in rest
            }
            sequence.append(min(rest, key=lambda h: (join[h], h)))

    tri_poly = _triangle_poly(scn, t)

    # two coverers meeting at a single point inside t: the pairwise ratio is
    # already the answer
    if len(hs) == 2 and seed_ratio is not None and seed_path is not None:
        q = _point_along(np.asarray(seed_path),
                         cls.guards[sequence[0]].length * seed_ratio)
        if tri_poly.covers(Point(q)):
            return TriangleCertificate(
                triangle=t, sequence=tuple(sequence), ratio=seed_ratio,
                seed=seed, seed_ratio=seed_ratio,
                seed_path=tuple(map(tuple, np.asarray(seed_path))),
                witness_point=(float(q[0]), float(q[1])),
            )

    def empty(r: float) -> bool:
        piece = scn.context(r).triangle_piece(t)
        return _witness_point(piece, area_tol, len_tol) is None

    if empty(r_hi):
        ratio, wpt = math.inf, None
    else:
        lo = max((v[0] for v in finite.values()), default=0.0)
        lo = min(lo, r_hi * 0.5)
        if lo <= 0.0 or not empty(lo):
            lo = tol
        ratio = _bisect(empty, lo, r_hi, tol)
        wpt = _witness_point(
            scn.context(min(ratio + 2 * tol, r_hi)).triangle_piece(t),
            area_tol, len_tol)
        if wpt is not None:
            wpt = (float(wpt[0]), float(wpt[1]))
    return TriangleCertificate(
        triangle=t, sequence=tuple(sequence), ratio=ratio,
        seed=seed, seed_ratio=seed_ratio,
        seed_path=None if seed_path is None
        else tuple(map(tuple, np.asarray(seed_path))),
        witness_point=wpt,
    )


def _triangle_poly(scn: Scenario, t: int):
    from shapely.geometry import Polygon as ShapelyPolygon
    return ShapelyPolygon(scn.tri.triangle_points(t))


def _point_along(path: np.ndarray, s: float) -> np.ndarray:
    """Point at arclength s from the start of a polyline."""
    acc = 0.0
    for a, b in zip(path[:-1], path[1:]):
        seg = float(np.hypot(*(b - a)))
        if acc + seg >= s and seg > 0.0:
            return a + (b - a) * ((s - acc) / seg)
        acc += seg
    return path[-1]


def max_speed_ratio(scn: Scenario) -> SpeedRatioResult:
    """Constructive r_max = min(r', min r_n), cross-checked by bisection."""
    r_hi = upper_bracket(scn)
    tol = BISECT_TOL_FRAC * r_hi
    r_prime, pairs = ratio_unsafe_pairs(scn)
    cls = scn.classification
    triangles = [
        triangle_ratio(scn, t)
        for t, st in enumerate(cls.status)
        if st == "regular" and not _plugged(cls, t)
    ]
    r_max = min([r_prime] + [c.ratio for c in triangles])

    def empty(r: float) -> bool:
        return not scn.context(r).witnesses

    brackets: list[tuple[float, float]] = []
    if empty(r_hi):
        r_bis = math.inf
    else:
        lo = PROBE_FRAC * r_hi
        if not empty(lo):
            lo = tol
        r_bis = _bisect(empty, lo, r_hi, tol, brackets)

    if math.isinf(r_max) or math.isinf(r_bis):
        discrepancy = not (math.isinf(r_max) and math.isinf(r_bis))
    else:
        discrepancy = abs(r_bis - r_max) > 1e-4 * max(r_max, tol)
    degenerate = (math.isfinite(r_max)
                  and empty(min(r_max * (1.0 + 1e-3), r_hi)))
    return SpeedRatioResult(
        r_prime=r_prime, pairs=pairs, triangles=triangles,
        r_max=r_max, r_bis=r_bis, r_hi=r_hi, brackets=brackets,
        degenerate=degenerate, discrepancy=discrepancy,
    )
