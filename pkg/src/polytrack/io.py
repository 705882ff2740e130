"""Fixture loading and artifact serialization.

All writers go through `dumps` so that identical values serialize to
identical bytes everywhere (CLI files, trace lines, session replies).
Floats use repr round-tripping, which always carries >= 15 significant
digits.
"""
from __future__ import annotations

import json
import os

from .polygon import SimplePolygon, validate_polygon


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


# -- fixtures ---------------------------------------------------------------


def polygon_to_dict(poly: SimplePolygon) -> dict:
    return {
        "version": 1,
        "vertices": [[float(x), float(y)] for x, y in poly.vertices],
    }


def polygon_from_dict(data: dict) -> SimplePolygon:
    if data.get("version") != 1:
        raise ValueError(f"unsupported fixture version {data.get('version')!r}")
    return validate_polygon(data["vertices"])


def scenario_to_dict(poly: SimplePolygon, guards, ratio: float | None) -> dict:
    out = polygon_to_dict(poly)
    if guards is not None:
        out["guards"] = [[int(a), int(b)] for a, b in guards]
    if ratio is not None:
        out["ratio"] = float(ratio)
    return out


def scenario_from_dict(data: dict):
    """(polygon, guards or None, ratio or None) from a scenario fixture."""
    poly = polygon_from_dict(data)
    guards = data.get("guards")
    if guards is not None:
        guards = [(int(a), int(b)) for a, b in guards]
    ratio = data.get("ratio")
    return poly, guards, None if ratio is None else float(ratio)


def load_scenario(path: str):
    return scenario_from_dict(read_json(path))


# -- geometry exports -------------------------------------------------------


def chain_lists(polylines) -> list[list[list[float]]]:
    """Chains as coordinate lists; closed chains repeat their first point."""
    out = []
    for pl in polylines:
        pts = pl.to_lists()
        if pl.closed and len(pts) > 2:
            pts.append(list(pts[0]))
        out.append(pts)
    return out


def curves_export(ctx) -> list[dict]:
    """Per-guard critical curve/region dump for plotting and the UI."""
    out = []
    for info in ctx.scn.classification.guards:
        reg = ctx.region(info.idx)
        if reg is None:
            continue
        out.append({
            "guard": info.idx,
            "endpoint": reg.endpoint,
            "s_int": chain_lists(reg.s_int),
            "s_ext": chain_lists(reg.s_ext),
            "region": reg.region.to_loops(),
            "inner": reg.inner.to_loops(),
            "d_max": reg.d_max,
        })
    return out


def classification_export(scn) -> dict:
    cls = scn.classification
    return {
        "triangles": [
            {
                "id": t,
                "vertices": [int(v) for v in scn.tri.triangles[t]],
                "status": cls.status[t],
                "options": [[int(g), int(e)] for g, e in cls.options[t]],
            }
            for t in range(len(scn.tri.triangles))
        ],
        "guards": [
            {
                "idx": info.idx,
                "diagonal": [int(info.diag[0]), int(info.diag[1])],
                "length": info.length,
                "type": info.gtype,
                "pinned": info.pinned,
                "region_endpoint": info.region_endpoint,
            }
            for info in cls.guards
        ],
        "conversions": [
            {"guard": g, "endpoint": e, "triangles": list(tids)}
            for g, e, tids in cls.conversions
        ],
    }


def analyze_exports(ctx) -> dict[str, object]:
    """File-name -> payload map produced by the analyze command."""
    return {
        "classification.json": classification_export(ctx.scn),
        "curves.json": curves_export(ctx),
        "partition.json": ctx.partition.to_dict(),
        "automaton.json": ctx.automaton.to_dict(),
        "report.json": ctx.report.to_dict(),
    }


def write_exports(out_dir: str, exports: dict[str, object]) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for name, payload in exports.items():
        write_json(os.path.join(out_dir, name), payload)


def trace_record_line(rec: dict) -> str:
    return dumps(rec)
