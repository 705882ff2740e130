"""Websocket session service for interactive probing.

One connection is one session. The client opens a named scenario, receives a
geometry bundle (polygon, triangulation, classification, curves/regions,
partition, automaton, trackability report, initial state), then drives the
pursuit tick by tick: every {"type":"intruder","target":[x,y]} message is
answered with a bare trace record — the same bytes `simulate` writes for the
same state, so recorded sessions and offline traces are interchangeable.
Control messages rebuild the context at a new ratio or reset the pursuit;
both answer with a fresh bundle. Protocol errors are answered with
{"type":"error",...} and leave the session state untouched.
"""
from __future__ import annotations

import json
import os
import re

import numpy as np

from . import io
from .analysis import Scenario
from .guards import GuardSetError
from .polygon import PolygonError
from .simulate import SimConfig, Simulator, TargetOutsidePolygon

_NAME_RE = re.compile(r"^[A-Za-z0-9_-]+$")


class Session:
    """Protocol state machine; synchronous so it can be tested directly."""

    def __init__(self, scenario_dir: str):
        self.scenario_dir = scenario_dir
        self.scn: Scenario | None = None
        self.ctx = None
        self.sim: Simulator | None = None

    # -- replies ------------------------------------------------------------

    def _error(self, code: str, message: str) -> str:
        return io.dumps({"type": "error", "code": code, "message": message})

    def _bundle(self) -> str:
        ctx, scn = self.ctx, self.scn
        return io.dumps({
            "type": "bundle",
            "scenario": scn.name,
            "polygon": io.polygon_to_dict(scn.poly),
            "triangles": [[int(v) for v in t] for t in scn.tri.triangles],
            "guards": [[int(a), int(b)] for a, b in scn.guards],
            "ratio": ctx.ratio,
            "classification": io.classification_export(scn),
            "curves": io.curves_export(ctx),
            "partition": ctx.partition.to_dict(),
            "automaton": ctx.automaton.to_dict(),
            "report": ctx.report.to_dict(),
            "state": self.sim.state_record(),
        })

    # -- message handling ----------------------------------------------------

    def handle(self, raw: str) -> str:
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as exc:
            return self._error("bad_json", str(exc))
        if not isinstance(msg, dict) or "type" not in msg:
            return self._error("bad_request", "message must be {\"type\": ...}")
        kind = msg["type"]
        if kind == "open":
            return self._open(msg)
        if self.sim is None:
            return self._error("no_session", "open a scenario first")
        if kind == "intruder":
            return self._intruder(msg)
        if kind == "set_ratio":
            return self._set_ratio(msg)
        if kind == "reset":
            self.sim.reset()
            return self._bundle()
        return self._error("unknown_type", f"unknown message type {kind!r}")

    def _open(self, msg) -> str:
        name = msg.get("scenario")
        if not isinstance(name, str) or not _NAME_RE.match(name):
            return self._error("bad_request", "scenario must be a simple name")
        path = os.path.join(self.scenario_dir, name + ".json")
        try:
            poly, guards, ratio = io.load_scenario(path)
        except OSError:
            return self._error("unknown_scenario", f"no scenario {name!r}")
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            return self._error("bad_scenario", str(exc))
        if ratio is None:
            ratio = msg.get("ratio")
        if ratio is None:
            return self._error("bad_scenario", "scenario has no speed ratio")
        if guards is None:
            from .guards import deploy_heuristic
            from .polygon import triangulate
            try:
                guards = deploy_heuristic(triangulate(poly))
            except GuardSetError as exc:
                return self._error("bad_scenario", str(exc))
        try:
            scn = Scenario(poly, guards, name=name)
            ctx = scn.context(float(ratio))
            sim = Simulator(ctx, SimConfig())
        except (PolygonError, GuardSetError, ValueError) as exc:
            return self._error("bad_scenario", str(exc))
        self.scn, self.ctx, self.sim = scn, ctx, sim
        return self._bundle()

    def _intruder(self, msg) -> str:
        target = msg.get("target")
        if (not isinstance(target, (list, tuple)) or len(target) != 2):
            return self._error("bad_request", "target must be [x, y]")
        try:
            rec = self.sim.step(target)
        except TargetOutsidePolygon as exc:
            return self._error("target_outside", str(exc))
        return io.dumps(rec)

    def _set_ratio(self, msg) -> str:
        ratio = msg.get("ratio")
        if not isinstance(ratio, (int, float)) or not ratio > 0.0:
            return self._error("bad_ratio", "ratio must be a positive number")
        p_hold = self.sim.p_I.copy()
        try:
            ctx = self.scn.context(float(ratio))
            sim = Simulator(ctx, SimConfig())
        except ValueError as exc:
            return self._error("bad_ratio", str(exc))
        sim.p_I = p_hold
        sim.stations = np.array(ctx.reactive_stations(p_hold))
        self.ctx, self.sim = ctx, sim
        return self._bundle()


def serve_forever(port: int, scenario_dir: str) -> None:
    """Block serving websocket sessions until interrupted."""
    import asyncio

    from websockets.asyncio.server import serve

    async def handler(ws):
        session = Session(scenario_dir)
        async for raw in ws:
            await ws.send(session.handle(raw))

    async def main():
        async with serve(handler, None, port):
            await asyncio.get_running_loop().create_future()

    asyncio.run(main())
