"""Command-line surface: analyze | speedratio | simulate | serve.

Exit codes: 0 — trackable / TRACKED verdict, 2 — not trackable / BREACH,
1 — input or usage error. Outputs are pure functions of (fixture, flags,
seed), so repeated runs are byte-identical.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import io
from .analysis import Scenario
from .guards import GuardSetError, deploy_heuristic
from .polygon import OutsidePolygon, PolygonError
from .simulate import SimConfig, TargetOutsidePolygon, make_policy, run
from .speedratio import max_speed_ratio


class InputError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polytrack",
        description="diagonal-guard tracking analysis of simple polygons",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, ratio=True):
        p.add_argument("--scenario", required=True,
                       help="scenario fixture file (or directory for serve)")
        p.add_argument("--out", default=".", help="output directory")
        if ratio:
            p.add_argument("--ratio", type=float, default=None,
                           help="intruder/guard speed ratio (overrides fixture)")

    p = sub.add_parser("analyze", help="classify, build regions, decide trackability")
    common(p)

    p = sub.add_parser("speedratio", help="maximum trackable speed ratio")
    common(p, ratio=False)

    p = sub.add_parser("simulate", help="run the discrete-time pursuit")
    common(p)
    p.add_argument("--policy", default="greedy",
                   help="greedy | witness | script:FILE")
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("serve", help="websocket session service")
    common(p, ratio=False)
    p.add_argument("--port", type=int, default=8765)
    return ap


def _load_scenario(path: str, ratio_flag: float | None,
                   need_ratio: bool = True):
    try:
        poly, guards, ratio = io.load_scenario(path)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read scenario {path}: {exc}") from exc
    name = os.path.splitext(os.path.basename(path))[0]
    if guards is None:
        guards = deploy_heuristic(_triangulation(poly))
    scn = Scenario(poly, guards, name=name)
    if ratio_flag is not None:
        ratio = ratio_flag
    if need_ratio and ratio is None:
        raise InputError("no speed ratio: set \"ratio\" in the fixture or pass --ratio")
    return scn, ratio


def _triangulation(poly):
    from .polygon import triangulate
    return triangulate(poly)


def cmd_analyze(args) -> int:
    scn, ratio = _load_scenario(args.scenario, args.ratio)
    ctx = scn.context(ratio)
    io.write_exports(args.out, io.analyze_exports(ctx))
    rep = ctx.report
    if rep.trackable:
        print(f"trackable at r={ratio:g} "
              f"({ctx.partition.n_faces} faces, {rep.iterations} iterations)")
        return 0
    print(f"not trackable at r={ratio:g}: {len(rep.witnesses)} witness(es)")
    for w in rep.witnesses:
        print(f"  {w.cause} at ({w.point[0]:.6g}, {w.point[1]:.6g}) "
              f"guards {list(w.guards)}")
    return 2


def cmd_speedratio(args) -> int:
    scn, _ = _load_scenario(args.scenario, None, need_ratio=False)
    res = max_speed_ratio(scn)
    os.makedirs(args.out, exist_ok=True)
    io.write_json(os.path.join(args.out, "speedratio.json"), res.to_dict())
    if res.unbounded:
        print("r_max unbounded (no dual-zone guards or contested triangles)")
    else:
        print(f"r_max={res.r_max:.12g} (bisection cross-check {res.r_bis:.12g})")
    return 0


def cmd_simulate(args) -> int:
    scn, ratio = _load_scenario(args.scenario, args.ratio)
    ctx = scn.context(ratio)
    policy = make_policy(args.policy, ctx, args.seed)
    config = SimConfig(dt=args.dt, steps=args.steps, seed=args.seed)
    trace = run(ctx, policy, config)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "trace.jsonl"), "w") as fh:
        fh.write(trace.to_jsonl())
    if trace.verdict == "TRACKED":
        print(f"TRACKED for {len(trace.records) - 1} steps")
        return 0
    print(f"BREACH at t={trace.breach['t']:g} "
          f"p=({trace.breach['p_I'][0]:.6g}, {trace.breach['p_I'][1]:.6g})")
    return 2


def cmd_serve(args) -> int:
    from .server import serve_forever
    serve_forever(args.port, args.scenario)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "analyze": cmd_analyze,
        "speedratio": cmd_speedratio,
        "simulate": cmd_simulate,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (InputError, PolygonError, GuardSetError, OutsidePolygon,
            TargetOutsidePolygon, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
