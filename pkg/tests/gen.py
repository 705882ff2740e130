"""Seeded random fixtures: star polygons with greedy guard deployments."""
from __future__ import annotations

import numpy as np

from polytrack import Scenario, deploy_heuristic, triangulate, validate_polygon
from polytrack.guards import GuardSetError
from polytrack.polygon import PolygonError


def star_polygon(rng: np.random.Generator, n: int = 10, spread: float = 0.55):
    """Random star-shaped polygon around the origin; always simple and CCW."""
    while True:
        ang = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
        gaps = np.diff(ang, append=ang[0] + 2.0 * np.pi)
        if gaps.min() < 0.05:
            continue  # razor wedges make degenerate triangulations
        rad = rng.uniform(1.0 - spread, 1.0 + spread, n)
        pts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        try:
            return validate_polygon(pts)
        except PolygonError:
            continue


def random_scenario(seed: int, n: int = 10, spread: float = 0.55) -> Scenario:
    """Star polygon plus heuristic guards; redraws until the greedy cover lands."""
    rng = np.random.default_rng(seed)
    while True:
        poly = star_polygon(rng, n, spread)
        try:
            guards = deploy_heuristic(triangulate(poly))
            return Scenario(poly, guards)
        except GuardSetError:
            continue
