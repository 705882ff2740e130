import math

import numpy as np
import pytest

import common
import gen
from polytrack.analysis import Scenario
from polytrack.speedratio import (
    NoInternalCurves,
    max_speed_ratio,
    pairwise_ratio,
    ratio_unsafe_pairs,
    triangle_ratio,
    upper_bracket,
)

# threshold values pinned from the bisection cross-check (r_bis agrees to 1e-4)
R_MAX = {
    "pentagon": math.inf,
    "lshape": 0.3162277660168379,
    "deadlock": 0.7071639511389364,
    "protected": 0.4776126685899611,
    "gallery": 0.21156034040917718,
    "showcase": 0.30343738839195605,
}


def test_upper_bracket_positive():
    for name in common.FIXTURES:
        scn, _ = common.get_scenario(name)
        assert upper_bracket(scn) > 0


def test_idle_guard_means_unbounded():
    res = common.get_speedratio("pentagon")
    assert res.unbounded
    assert res.r_max == math.inf and res.r_prime == math.inf
    assert res.pairs == [] and res.triangles == []
    assert math.isinf(res.r_bis)
    assert not res.degenerate and not res.discrepancy
    assert res.to_dict()["r_max"] is None          # inf serializes as null


def test_single_guard_threshold_is_pair_bound():
    res = common.get_speedratio("lshape")
    assert res.r_max == pytest.approx(R_MAX["lshape"], rel=1e-9)
    assert res.r_max == res.r_prime
    (cert,) = res.pairs
    assert cert.guard == 0
    assert cert.ratio == pytest.approx(cert.gap / cert.length, rel=1e-12)
    assert cert.path is not None and len(cert.path) >= 2
    assert res.triangles == []
    assert abs(res.r_bis - res.r_max) <= 1e-4 * res.r_max
    assert not res.degenerate and not res.discrepancy


def test_regular_triangle_lowers_threshold():
    res = common.get_speedratio("deadlock")
    assert res.r_max == pytest.approx(R_MAX["deadlock"], rel=1e-9)
    assert res.r_prime == pytest.approx(1.0, rel=1e-6)
    assert res.r_max < res.r_prime                 # the triangle bound binds
    tri_best = min(c.ratio for c in res.triangles)
    assert res.r_max == pytest.approx(min(res.r_prime, tri_best), rel=1e-12)
    for cert in res.triangles:
        assert cert.sequence                        # admission order recorded
        assert cert.witness_point is not None
    assert abs(res.r_bis - res.r_max) <= 1e-4 * res.r_max


def test_remaining_fixture_thresholds():
    for name in ("protected", "gallery", "showcase"):
        res = common.get_speedratio(name)
        assert res.r_max == pytest.approx(R_MAX[name], rel=1e-9), name
        assert abs(res.r_bis - res.r_max) <= 1e-4 * res.r_max, name
        assert not res.degenerate and not res.discrepancy, name


def test_showcase_certificates():
    res = common.get_speedratio("showcase")
    (pair,) = res.pairs
    assert pair.guard == 2
    assert pair.ratio == pytest.approx(res.r_max, rel=1e-9)
    assert {c.triangle for c in res.triangles} == {1, 5, 6}
    for cert in res.triangles:
        assert cert.ratio > res.r_max              # none of them binds
        assert set(cert.sequence) <= {0, 1, 2}
        assert cert.seed is not None and cert.seed_ratio is not None


def test_pairwise_ratio_demands_internal_curves():
    scn, _ = common.get_scenario("showcase")
    with pytest.raises(NoInternalCurves):
        pairwise_ratio(scn, 3, 4)                  # both pinned


def test_triangle_ratio_rejects_non_regular():
    scn, _ = common.get_scenario("deadlock")
    t = scn.classification.status.index("unsafe")
    with pytest.raises(ValueError):
        triangle_ratio(scn, t)


def test_ratio_unsafe_pairs_matches_result():
    scn, _ = common.get_scenario("lshape")
    r_prime, certs = ratio_unsafe_pairs(scn)
    res = common.get_speedratio("lshape")
    assert r_prime == pytest.approx(res.r_prime, rel=1e-12)
    assert [c.guard for c in certs] == [c.guard for c in res.pairs]


def test_bisection_brackets_shrink():
    res = common.get_speedratio("deadlock")
    assert res.brackets
    widths = [hi - lo for lo, hi in res.brackets]
    assert all(w2 <= w1 + 1e-15 for w1, w2 in zip(widths, widths[1:]))
    lo, hi = res.brackets[-1]
    assert lo <= res.r_bis <= hi


def test_random_fixture_agreement():
    # seeds chosen once so every draw yields a bounded, non-degenerate instance
    for seed in (0, 1, 2):
        scn = gen.random_scenario(seed, n=8)
        res = max_speed_ratio(scn)
        if res.unbounded or res.degenerate:
            continue
        assert abs(res.r_bis - res.r_max) <= 1e-4 * max(res.r_max, 1e-12), seed
