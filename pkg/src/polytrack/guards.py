"""Guard placement on triangulation diagonals and the triangle/guard taxonomy.

Triangle statuses:
  safe    -- covered at all times by construction (a guard diagonal is one of
             its edges, or a pinned guard sits at one of its vertices),
  unsafe  -- exactly one live (guard, endpoint) option,
  regular -- two or more live options.

Guard types:
  0 -- never needs to move (pinned at an endpoint, or anywhere if idle),
  1 -- owns an unsafe zone and has no regular triangles at its active endpoint,
  2 -- protects regular triangles whose other coverers are already scheduled,
  3 -- unresolvable as-is; one of its regular fans is converted to unsafe
       triangles it owns, and classification restarts.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .polygon import Triangulation


class GuardSetError(ValueError):
    pass


class NotATriangulationEdge(GuardSetError):
    pass


class DuplicateGuard(GuardSetError):
    pass


class UncoverableTriangle(GuardSetError):
    pass


class HeuristicFailed(GuardSetError):
    pass


@dataclass
class GuardInfo:
    idx: int
    diag: tuple[int, int]            # vertex indices (a, b); endpoint 0 = a, endpoint 1 = b
    length: float
    gtype: int = -1
    pinned: int | str | None = None  # endpoint index, "free", or None
    region_endpoint: int | None = None
    zone_A: frozenset = frozenset()
    zone_T: tuple = (frozenset(), frozenset())
    zone_U: tuple = (frozenset(), frozenset())
    zone_R: tuple = (frozenset(), frozenset())
    zone_B: frozenset = frozenset()

    def endpoint_vertex(self, e: int) -> int:
        return self.diag[e]

    @property
    def rest_endpoint(self) -> int | None:
        return None if self.region_endpoint is None else 1 - self.region_endpoint


@dataclass
class Classification:
    status: list[str]                    # per-triangle: safe | unsafe | regular
    owner: dict                          # tid -> (guard, endpoint) for unsafe triangles
    guards: list[GuardInfo]
    conversions: list[tuple[int, int, tuple]]   # (guard, endpoint, tids) applied, in order
    build_order: list[int]               # guards whose critical region exists, dependency order
    options: list[list[tuple[int, int]]]

    def neighbors(self, i: int, k: int) -> bool:
        """Guards are neighbors when their incident triangle sets intersect."""
        ti = self.guards[i].zone_T[0] | self.guards[i].zone_T[1]
        tk = self.guards[k].zone_T[0] | self.guards[k].zone_T[1]
        return bool(ti & tk)


def validate_guard_set(tri: Triangulation, guards) -> list[tuple[int, int]]:
    """Check guard diagonals against the triangulation; returns normalized pairs."""
    diagset = set(tri.diagonals)
    norm = []
    for g in guards:
        key = tuple(sorted((int(g[0]), int(g[1]))))
        if key not in diagset:
            raise NotATriangulationEdge(f"{tuple(g)} is not a triangulation diagonal")
        if key in norm:
            raise DuplicateGuard(f"guard diagonal {key} appears twice")
        norm.append(key)
    if len(norm) > tri.poly.n // 4:
        warnings.warn(
            f"{len(norm)} guards exceed the floor(n/4) = {tri.poly.n // 4} budget",
            stacklevel=2,
        )
    # every triangle needs a diagonal edge or a guard endpoint among its vertices
    endpoints = {v for g in norm for v in g}
    for t, tri_idx in enumerate(tri.triangles):
        edges = {tuple(sorted(e)) for e in zip(tri_idx, tri_idx[1:] + tri_idx[:1])}
        if not (edges & set(norm)) and not (set(tri_idx) & endpoints):
            raise UncoverableTriangle(f"triangle {t} {tri_idx} has no potential coverer")
    return norm


def deploy_heuristic(tri: Triangulation) -> list[tuple[int, int]]:
    """Greedy cover: repeatedly add the diagonal covering the most uncovered triangles.

    Raises HeuristicFailed when no diagonal can cover what is left or the
    greedy pick exceeds the floor(n/4) budget.
    """
    n_tri = len(tri.triangles)
    budget = (n_tri + 2) // 4          # n vertices = n_tri + 2
    cover = {}
    for d in tri.diagonals:
        covered = set(tri.triangles_with_edge(d))
        for v in d:
            covered.update(tri.triangles_at_vertex(v))
        cover[d] = covered
    chosen: list[tuple[int, int]] = []
    left = set(range(n_tri))
    while left:
        if not cover or len(chosen) >= budget:
            raise HeuristicFailed(
                f"greedy deployment needs more than {budget} guards for {n_tri + 2} vertices")
        best = max(cover, key=lambda d: (len(cover[d] & left), tuple(-x for x in d)))
        gain = cover[best] & left
        if not gain:
            raise HeuristicFailed("greedy deployment cannot cover remaining triangles")
        chosen.append(best)
        left -= gain
    return sorted(chosen)


def _live_options(tri: Triangulation, guards, pinned, conversions):
    """Per-triangle live (guard, endpoint) options plus the always-covered mask."""
    n_tri = len(tri.triangles)
    always = [False] * n_tri
    options = [[] for _ in range(n_tri)]
    for g, (a, b) in enumerate(guards):
        for t in tri.triangles_with_edge((a, b)):
            always[t] = True
        pin = pinned.get(g)
        for e, v in enumerate((a, b)):
            if pin == "free" or (pin is not None and pin != e):
                continue
            for t in tri.triangles_at_vertex(v):
                options[t].append((g, e))
        if pin in (0, 1):
            for t in tri.triangles_at_vertex((a, b)[pin]):
                always[t] = True
    for t, owner in conversions.items():
        if not always[t]:
            options[t] = [owner]
    return options, always


def _statuses(options, always):
    status = []
    owner = {}
    for t, opts in enumerate(options):
        if always[t]:
            status.append("safe")
        elif len(opts) == 1:
            status.append("unsafe")
            owner[t] = opts[0]
        elif len(opts) >= 2:
            status.append("regular")
        else:
            raise UncoverableTriangle(f"triangle {t} lost all coverage options")
    return status, owner


def _tri_area(tri: Triangulation, tids) -> float:
    total = 0.0
    for t in tids:
        p = tri.triangle_points(t)
        u, w = p[1] - p[0], p[2] - p[0]
        total += 0.5 * abs(u[0] * w[1] - u[1] * w[0])
    return total


def classify(tri: Triangulation, guards) -> Classification:
    """Classify triangles and guards; applies type-3 conversions until stable."""
    guards = [tuple(sorted(g)) for g in guards]
    v = tri.poly.vertices
    lengths = [float(np.hypot(*(v[b] - v[a]))) for a, b in guards]
    conversions: dict[int, tuple[int, int]] = {}
    conversion_log: list[tuple[int, int, tuple]] = []

    for _round in range(4 * len(tri.triangles) + 4):
        pinned: dict[int, int | str] = {}
        # --- type 0 fixpoint: pin guards whose far side is already covered
        while True:
            options, always = _live_options(tri, guards, pinned, conversions)
            status, owner = _statuses(options, always)
            progressed = False
            for g, (a, b) in enumerate(guards):
                if g in pinned:
                    continue
                inc = [set(tri.triangles_at_vertex(a)), set(tri.triangles_at_vertex(b))]
                a_tris = set(tri.triangles_with_edge((a, b)))
                feasible = []
                for e in (0, 1):
                    far = inc[1 - e] - inc[e] - a_tris
                    handled = all(
                        status[t] == "safe" or (status[t] == "unsafe" and owner[t][0] != g)
                        for t in far
                    )
                    if handled:
                        feasible.append(e)
                if len(feasible) == 2 and all(status[t] == "safe" for t in inc[0] | inc[1]):
                    pinned[g] = "free"
                    progressed = True
                elif feasible:
                    if len(feasible) == 2:
                        # pick the endpoint that newly protects more triangles
                        gain = [
                            sum(1 for t in inc[e] if status[t] != "safe") for e in (0, 1)
                        ]
                        e = 0 if gain[0] >= gain[1] else 1
                    else:
                        e = feasible[0]
                    pinned[g] = e
                    progressed = True
                if progressed:
                    break
            if not progressed:
                break

        options, always = _live_options(tri, guards, pinned, conversions)
        status, owner = _statuses(options, always)

        # --- zones
        infos = []
        for g, (a, b) in enumerate(guards):
            inc = (frozenset(tri.triangles_at_vertex(a)), frozenset(tri.triangles_at_vertex(b)))
            A = frozenset(tri.triangles_with_edge((a, b)))
            U = tuple(
                frozenset(t for t in inc[e] if status[t] == "unsafe" and owner[t] == (g, e))
                for e in (0, 1)
            )
            R = tuple(
                frozenset(t for t in inc[e] if status[t] == "regular" and (g, e) in options[t])
                for e in (0, 1)
            )
            B = set(A)
            for t in inc[0] | inc[1]:
                if status[t] == "safe" and any(tri.adjacent(t, t2) for t2 in A):
                    B.add(t)
            infos.append(GuardInfo(
                idx=g, diag=(a, b), length=lengths[g],
                zone_A=A, zone_T=inc, zone_U=U, zone_R=R, zone_B=frozenset(B),
            ))

        # --- choose region endpoints and assign types
        for g, info in enumerate(infos):
            if g in pinned:
                info.gtype = 0
                info.pinned = pinned[g]
                continue
            has = [(len(info.zone_U[e]) > 0, len(info.zone_R[e]) > 0) for e in (0, 1)]
            if not any(u or r for u, r in has):
                # no duties anywhere; the type-0 pass should have caught this
                info.gtype = 0
                info.pinned = "free"
                continue
            u_area = [_tri_area(tri, info.zone_U[e]) for e in (0, 1)]
            r_area = [_tri_area(tri, info.zone_R[e]) for e in (0, 1)]
            if has[0][0] and has[1][0]:
                e = 0 if u_area[0] >= u_area[1] else 1
            elif has[0][0] or has[1][0]:
                e = 0 if has[0][0] else 1
            else:
                e = 0 if r_area[0] >= r_area[1] else 1
            info.region_endpoint = e
            info.gtype = 1 if not info.zone_R[e] else -1   # -1: 2 or 3, resolved below

        # --- type 2 dependency rounds
        defined = {g for g, i in enumerate(infos) if i.gtype == 1}
        build_order = sorted(defined)
        changed = True
        while changed:
            changed = False
            for g, info in enumerate(infos):
                if info.gtype != -1:
                    continue
                e = info.region_endpoint
                deps_ok = True
                for t in info.zone_R[e]:
                    for (h, f) in options[t]:
                        if h != g and h not in pinned and h not in defined:
                            deps_ok = False
                if deps_ok:
                    info.gtype = 2
                    defined.add(g)
                    build_order.append(g)
                    changed = True

        stuck = [g for g, i in enumerate(infos) if i.gtype == -1]
        if not stuck:
            return Classification(
                status=status, owner=owner, guards=infos,
                conversions=conversion_log, build_order=build_order, options=options,
            )

        # --- type 3: convert the lowest-id stuck guard and restart
        g = stuck[0]
        info = infos[g]
        cands = [e for e in (0, 1) if info.zone_R[e]]
        e = min(cands, key=lambda e: (len(info.zone_R[e]), e))
        tids = tuple(sorted(info.zone_R[e]))
        for t in tids:
            conversions[t] = (g, e)
        conversion_log.append((g, e, tids))

    raise GuardSetError("classification failed to stabilize")
