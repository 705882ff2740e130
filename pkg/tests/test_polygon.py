import numpy as np
import pytest
from shapely.geometry import Point
from shapely.geometry import Polygon as ShapelyPolygon

import gen
from polytrack.polygon import (
    PolygonError,
    RepeatedVertex,
    SelfIntersection,
    SimplePolygon,
    TooFewVertices,
    ZeroArea,
    triangulate,
    validate_polygon,
)

SQUARE = [(0, 0), (4, 0), (4, 4), (0, 4)]
LSHAPE = [(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)]


def test_rejects_bad_input():
    with pytest.raises(TooFewVertices):
        SimplePolygon([(0, 0), (1, 0)])
    with pytest.raises(RepeatedVertex):
        SimplePolygon([(0, 0), (1, 0), (1, 1), (0, 0.0), (0, 2)])
    with pytest.raises(SelfIntersection):
        SimplePolygon([(0, 0), (5, 0), (0, 3), (3, 3)])  # lopsided bowtie
    with pytest.raises(PolygonError):
        SimplePolygon([(0, 0), (2, 2), (2, 0), (0, 2)])  # symmetric bowtie
    with pytest.raises(SelfIntersection):
        SimplePolygon([(0, 0), (4, 0), (4, 2), (2, 0), (2, 4)])  # vertex on edge
    with pytest.raises(ZeroArea):
        SimplePolygon([(0, 0), (1, 1), (2, 2)])


def test_orientation_normalized():
    ccw = SimplePolygon(SQUARE)
    cw = SimplePolygon(SQUARE[::-1])
    assert np.allclose(ccw.vertices[0], cw.vertices[np.where(
        (cw.vertices == ccw.vertices[0]).all(axis=1))[0][0]])
    # both end up counter-clockwise
    for poly in (ccw, cw):
        x, y = poly.vertices.T
        assert np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)) > 0


def test_closed_ring_accepted():
    poly = SimplePolygon(SQUARE + [SQUARE[0]])
    assert poly.n == 4
    assert abs(poly.area - 16.0) < 1e-12
    assert abs(poly.diameter - np.hypot(4, 4)) < 1e-12


def test_contains_and_reflex():
    poly = SimplePolygon(LSHAPE)
    assert poly.contains((1, 1))
    assert poly.contains((4, 2))          # boundary counts as inside
    assert not poly.contains((3, 3))
    assert [i for i in range(poly.n) if poly.is_reflex(i)] == [3]


def test_triangulation_tiles_polygon():
    rng = np.random.default_rng(11)
    for _ in range(20):
        poly = gen.star_polygon(rng, n=int(rng.integers(5, 14)))
        tri = triangulate(poly)
        assert len(tri.triangles) == poly.n - 2
        assert len(tri.diagonals) == poly.n - 3
        areas = []
        for a, b, c in tri.triangles:
            p, q, r = poly.vertices[[a, b, c]]
            cross = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
            assert cross > 0  # CCW and non-degenerate
            areas.append(0.5 * cross)
        assert abs(sum(areas) - poly.area) < 1e-9 * poly.area
        # every triangle stays inside the polygon
        shp = ShapelyPolygon(poly.vertices).buffer(poly.eps)
        for t in range(len(tri.triangles)):
            assert shp.covers(ShapelyPolygon(tri.triangle_points(t)))


def test_triangulation_adjacency():
    tri = triangulate(SimplePolygon(LSHAPE))
    for t, nbrs in enumerate(tri.neighbors):
        for key, u in nbrs:
            assert key in tri.diagonals
            assert set(key) <= set(tri.triangles[t]) and set(key) <= set(tri.triangles[u])
    # interior diagonals are shared by exactly two triangles
    for d in tri.diagonals:
        assert len(tri.triangles_with_edge(d)) == 2


def test_locate():
    poly = SimplePolygon(LSHAPE)
    tri = triangulate(poly)
    rng = np.random.default_rng(7)
    hits = 0
    while hits < 200:
        p = rng.uniform(0, 4, 2)
        if not poly.contains(p, tol=0.0):
            continue
        t = tri.locate(p)
        assert ShapelyPolygon(tri.triangle_points(t)).buffer(poly.eps).covers(Point(p))
        hits += 1
    # vertex shared by several triangles resolves to the lowest id
    shared = tri.locate(poly.vertices[0])
    assert shared == min(t for t in range(len(tri.triangles)) if 0 in tri.triangles[t])


def test_validate_polygon_roundtrip():
    poly = validate_polygon(SQUARE)
    assert isinstance(poly, SimplePolygon)
    assert poly.n == 4
