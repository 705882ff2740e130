"""Discrete-time execution of the tracking game.

Each step the intruder advances along a re-planned geodesic toward its
policy's target (clipped to v_e*dt, landing exactly on the target when in
range), then every guard moves its station toward the reactive value at the
new intruder position, clipped to v_g*dt over its diagonal length. Coverage
means some guard stands on the boundary of the triangle containing the
intruder (within geometric tolerance). A step that ends uncovered is
re-simulated at dt/10 before a breach is reported: the continuous-time
policy never loses coverage below the critical ratio, so macro-step lag must
not produce false verdicts.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .analysis import AnalysisContext
from .primitives import seg_point_distance


class TargetOutsidePolygon(ValueError):
    pass


class NoWitness(ValueError):
    pass


@dataclass
class SimConfig:
    dt: float | None = None     # defaults to 1e-3 * polygon diameter / v_g
    steps: int = 10000
    seed: int = 0
    v_g: float = 1.0

    def resolve_dt(self, diameter: float) -> float:
        return self.dt if self.dt is not None else 1e-3 * diameter / self.v_g


@dataclass
class Trace:
    records: list[dict] = field(default_factory=list)
    verdict: str = "TRACKED"
    breach: dict | None = None    # {"t":.., "p_I":[..]} at first uncovered state

    def to_jsonl(self) -> str:
        from .io import dumps
        lines = [dumps(r) for r in self.records]
        lines.append(dumps({"verdict": self.verdict, "breach": self.breach}))
        return "\n".join(lines) + "\n"


class Simulator:
    """Single deterministic session over one analysis context."""

    def __init__(self, ctx: AnalysisContext, config: SimConfig | None = None):
        self.ctx = ctx
        self.config = config or SimConfig()
        scn = ctx.scn
        self.poly = scn.poly
        self.dt = self.config.resolve_dt(self.poly.diameter)
        self.v_e = ctx.ratio * self.config.v_g
        v = self.poly.vertices
        self.diag_a = np.array([v[a] for a, _ in scn.guards], float)
        self.diag_b = np.array([v[b] for _, b in scn.guards], float)
        self.lengths = np.hypot(*(self.diag_b - self.diag_a).T)
        self.cover_tol = 4.0 * self.poly.eps
        self.reset()

    # -- state ------------------------------------------------------------

    def reset(self):
        start = self.poly.shapely.representative_point()
        self.p_I = np.array([start.x, start.y])
        self.stations = np.array(self.ctx.reactive_stations(self.p_I))
        self.step_index = 0

    def state_record(self) -> dict:
        covered, ids = self.coverage(self.p_I, self.stations)
        return {
            "t": self.step_index * self.dt,
            "p_I": [float(self.p_I[0]), float(self.p_I[1])],
            "s": [float(s) for s in self.stations],
            "mode": self.ctx.partition.mode_of(self.p_I),
            "covered": covered,
            "guards": ids,
        }

    # -- geometry ---------------------------------------------------------

    def guard_position(self, g: int, lam: float) -> np.ndarray:
        return self.diag_a[g] + lam * (self.diag_b[g] - self.diag_a[g])

    def coverage(self, p, stations) -> tuple[bool, list[int]]:
        """Guards standing on the boundary of the intruder's triangle."""
        t = self.ctx.scn.tri.locate(p)
        pts = self.ctx.scn.tri.triangle_points(t)
        ids = []
        for g in range(len(self.lengths)):
            pos = self.guard_position(g, stations[g])
            d = min(
                seg_point_distance(pos, pts[i], pts[(i + 1) % 3])[0]
                for i in range(3)
            )
            if d <= self.cover_tol:
                ids.append(g)
        return bool(ids), ids

    def _advance_intruder(self, p: np.ndarray, target: np.ndarray,
                          budget: float) -> np.ndarray:
        if budget <= 0.0 or np.array_equal(p, target):
            return p
        dist, path = self.ctx.scn.engine.path(p, target)
        if dist <= budget:
            return target.copy()
        acc = 0.0
        for a, b in zip(path[:-1], path[1:]):
            seg = float(np.hypot(*(b - a)))
            if acc + seg >= budget:
                return a + (b - a) * ((budget - acc) / seg) if seg > 0.0 else a
            acc += seg
        return path[-1]

    def _move_guards(self, stations: np.ndarray, p: np.ndarray,
                     dt: float) -> np.ndarray:
        targets = np.array(self.ctx.reactive_stations(p))
        max_d = self.config.v_g * dt / self.lengths
        delta = np.clip(targets - stations, -max_d, max_d)
        return stations + delta

    # -- stepping ---------------------------------------------------------

    def step(self, target) -> dict:
        """One macro step toward target; returns the new state's record."""
        target = np.asarray(target, float)
        if not self.poly.contains(target):
            raise TargetOutsidePolygon(f"target {tuple(target)} outside polygon")
        p0, s0 = self.p_I, self.stations
        p1 = self._advance_intruder(p0, target, self.v_e * self.dt)
        s1 = self._move_guards(s0, p1, self.dt)
        covered, _ = self.coverage(p1, s1)
        if not covered:
            # re-check at dt/10: discrete guard lag near curve boundaries
            # must not masquerade as a breach
            sub_dt = self.dt / 10.0
            p, s = p0, s0
            for k in range(1, 11):
                p = self._advance_intruder(p, target, self.v_e * sub_dt)
                s = self._move_guards(s, p, sub_dt)
                ok, _ = self.coverage(p, s)
                if not ok:
                    self.p_I, self.stations = p, s
                    self.step_index += 1
                    rec = self.state_record()
                    rec["t"] = (self.step_index - 1) * self.dt + k * sub_dt
                    return rec
            p1, s1 = p, s
        self.p_I, self.stations = p1, s1
        self.step_index += 1
        return self.state_record()


def run(ctx: AnalysisContext, policy, config: SimConfig | None = None) -> Trace:
    """Run the pursuit to the step budget; TRACKED unless coverage fails."""
    sim = Simulator(ctx, config)
    trace = Trace()
    trace.records.append(sim.state_record())
    if not trace.records[0]["covered"]:
        trace.verdict = "BREACH"
        trace.breach = {"t": 0.0, "p_I": trace.records[0]["p_I"]}
        return trace
    for _ in range(sim.config.steps):
        target = policy.target(sim)
        rec = sim.step(target)
        trace.records.append(rec)
        if not rec["covered"]:
            trace.verdict = "BREACH"
            trace.breach = {"t": rec["t"], "p_I": rec["p_I"]}
            break
    return trace


# -- intruder policies ----------------------------------------------------


class ScriptPolicy:
    """Visit fixed waypoints in order; hold position after the last one."""

    def __init__(self, waypoints):
        self.waypoints = [np.asarray(w, float) for w in waypoints]
        if not self.waypoints:
            raise ValueError("script needs at least one waypoint")
        self.i = 0

    def target(self, sim: Simulator) -> np.ndarray:
        while (self.i + 1 < len(self.waypoints)
               and np.array_equal(sim.p_I, self.waypoints[self.i])):
            self.i += 1
        return self.waypoints[self.i]

    @classmethod
    def from_file(cls, path: str) -> "ScriptPolicy":
        with open(path) as fh:
            data = json.load(fh)
        return cls(data["waypoints"] if isinstance(data, dict) else data)


class GreedyPolicy:
    """Seeded adversary chasing positions that demand the most guard travel."""

    SAMPLES = 24

    def __init__(self, ctx: AnalysisContext, seed: int = 0):
        self.ctx = ctx
        self.rng = np.random.default_rng(seed)
        self.waypoint: np.ndarray | None = None

    def _score(self, p) -> float:
        total = 0.0
        for info in self.ctx.scn.classification.guards:
            if info.gtype == 0:
                continue
            total += self.ctx.region(info.idx).station(p) * info.length
        return total

    def target(self, sim: Simulator) -> np.ndarray:
        if self.waypoint is not None and not np.array_equal(sim.p_I, self.waypoint):
            return self.waypoint
        xmin, ymin, xmax, ymax = self.ctx.scn.poly.shapely.bounds
        cands = []
        while len(cands) < self.SAMPLES:
            q = self.rng.uniform((xmin, ymin), (xmax, ymax))
            if self.ctx.scn.poly.contains(q):
                cands.append(q)
        scores = [self._score(q) for q in cands]
        self.waypoint = cands[int(np.argmax(scores))]
        return self.waypoint


class WitnessPolicy:
    """Head for the nearest witness; on unsafe pairs, run the gap path first."""

    def __init__(self, ctx: AnalysisContext, seed: int = 0):
        self.ctx = ctx
        self.fallback = GreedyPolicy(ctx, seed)
        self.route: list[np.ndarray] | None = None
        self.i = 0

    def _plan(self, sim: Simulator):
        witnesses = self.ctx.witnesses
        if not witnesses:
            self.route = []
            return
        engine = self.ctx.scn.engine
        best = min(
            witnesses,
            key=lambda w: engine.distance(sim.p_I, np.asarray(w.point)),
        )
        route = []
        if best.cause == "UnsafePairOverlap":
            _, path = self.ctx.dual_zone_gap(best.guards[0])
            if path is not None:
                route.append(np.asarray(path[0], float))
        route.append(np.asarray(best.point, float))
        self.route = route

    def target(self, sim: Simulator) -> np.ndarray:
        if self.route is None:
            self._plan(sim)
        if not self.route:
            return self.fallback.target(sim)
        while (self.i + 1 < len(self.route)
               and np.array_equal(sim.p_I, self.route[self.i])):
            self.i += 1
        return self.route[self.i]


def witness_adversary(ctx: AnalysisContext, seed: int = 0) -> WitnessPolicy:
    if not ctx.witnesses:
        raise NoWitness("context has no unsafe-point witnesses")
    return WitnessPolicy(ctx, seed)


def make_policy(spec: str, ctx: AnalysisContext, seed: int = 0):
    if spec == "greedy":
        return GreedyPolicy(ctx, seed)
    if spec == "witness":
        return WitnessPolicy(ctx, seed)
    if spec.startswith("script:"):
        return ScriptPolicy.from_file(spec[len("script:"):])
    raise ValueError(f"unknown policy {spec!r}")
