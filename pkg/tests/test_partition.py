import numpy as np
import pytest

import common
from oracles import sample_interior
from polytrack import partition as partition_mod
from polytrack.analysis import Scenario
from polytrack.partition import DegenerateArrangement, build_partition
from polytrack.polygon import OutsidePolygon

# face labels (guard sets) and reachable-mode sets, per fixture
EXPECT = {
    "pentagon": {
        "labels": [()],
        "external": 1,
        "sigma": {1: (1,)},
    },
    "lshape": {
        "labels": [(0,), ()],
        "external": 2,
        "sigma": {1: (1, 2), 2: (1, 2)},
    },
    "deadlock": {
        "labels": [(0,), (0, 1), (1,), ()],
        "external": 4,
        "sigma": {1: (1, 2, 3, 4), 2: (1, 2, 3), 3: (1, 2, 3, 4), 4: (1, 3, 4)},
    },
    "protected": {
        "labels": [(0,), (0, 1), (1,), ()],
        "external": 4,
        "sigma": {1: (1, 2, 4), 2: (1, 2, 4), 3: (3, 4), 4: (1, 2, 3, 4)},
    },
    "gallery": {
        "labels": [(0,), (1,), (2,), (3,), ()],
        "external": 5,
        "sigma": {1: (1, 5), 2: (2, 5), 3: (3, 4, 5), 4: (3, 4, 5),
                  5: (1, 2, 3, 4, 5)},
    },
    "showcase": {
        "labels": [(0,), (1,), (2,), ()],
        "external": 4,
        "sigma": {1: (1, 4), 2: (2, 4), 3: (3, 4), 4: (1, 2, 3, 4)},
    },
}


def test_faces_tile_polygon():
    for name in common.FIXTURES:
        scn, ratio = common.get_scenario(name)
        part = scn.context(ratio).partition
        total = sum(geom.area for geom in part.geoms)
        assert abs(total - scn.poly.area) <= 1e-6 * scn.poly.area, name


def test_face_structure_per_fixture():
    for name, want in EXPECT.items():
        scn, ratio = common.get_scenario(name)
        part = scn.context(ratio).partition
        assert part.labels == want["labels"], name
        assert part.external == want["external"], name
        auto = part.to_automaton()
        got = {m.id: m.sigma for m in auto.modes}
        assert got == want["sigma"], name


def test_automaton_consistency():
    for name in common.FIXTURES:
        scn, ratio = common.get_scenario(name)
        part = scn.context(ratio).partition
        auto = part.to_automaton()
        ids = [m.id for m in auto.modes]
        assert ids == part.face_ids()
        for m in auto.modes:
            assert m.id in m.sigma                      # staying put is allowed
            assert set(m.sigma) <= set(ids)
        # adjacency is symmetric
        assert {(b, a) for a, b in auto.transitions} == set(auto.transitions)
        assert auto.external == part.external
        d = auto.to_dict()
        assert [m["id"] for m in d["modes"]] == ids
        assert d["external"] == part.external


def test_mode_of_agrees_with_geometry():
    rng = np.random.default_rng(14)
    for name in ("lshape", "deadlock", "gallery"):
        scn, ratio = common.get_scenario(name)
        part = scn.context(ratio).partition
        for p in sample_interior(scn.poly.vertices, rng, 40):
            m = part.mode_of(p)
            assert part.geoms[m - 1].covers_point(p, tol=1e-6 * scn.poly.diameter)
        with pytest.raises(OutsidePolygon):
            far = scn.poly.vertices.max(axis=0) + scn.poly.diameter
            part.mode_of(far)


def test_external_face_touches_wall():
    for name in common.FIXTURES:
        scn, ratio = common.get_scenario(name)
        part = scn.context(ratio).partition
        ext = part.geoms[part.external - 1]
        for comp in ext.components():
            assert comp.exterior.distance(scn.poly.shapely.exterior) <= scn.poly.eps
        assert part.labels[part.external - 1] == ()


def test_degenerate_arrangement_retries_with_nudged_ratio():
    scn0, ratio = common.get_scenario("lshape")
    scn = Scenario(scn0.poly, list(scn0.guards))
    calls = []
    real = build_partition

    def flaky(ctx):
        calls.append(ctx.ratio)
        if len(calls) == 1:
            raise DegenerateArrangement("synthetic overlap")
        return real(ctx)

    ctx = scn.context(ratio)
    try:
        partition_mod.build_partition = flaky
        part = ctx.partition
    finally:
        partition_mod.build_partition = real
    assert len(calls) == 2
    assert calls[0] == ratio
    assert calls[1] == pytest.approx(ratio * (1 + 1e-9), rel=1e-12)
    assert part.n_faces >= 1
