"""Shared fixture access with process-wide caches (scenario builds are slow)."""
from __future__ import annotations

import pathlib

from polytrack import Scenario
from polytrack.io import load_scenario
from polytrack.speedratio import SpeedRatioResult, max_speed_ratio

ROOT = pathlib.Path(__file__).resolve().parent.parent
SCENARIO_DIR = ROOT / "scenarios"

FIXTURES = ("pentagon", "lshape", "deadlock", "protected", "gallery", "showcase")

_scenarios: dict[str, tuple[Scenario, float]] = {}
_speedratios: dict[str, SpeedRatioResult] = {}


def fixture_path(name: str) -> str:
    return str(SCENARIO_DIR / f"{name}.json")


def get_scenario(name: str) -> tuple[Scenario, float]:
    """Cached (scenario, shipped ratio) for one of the repository fixtures."""
    if name not in _scenarios:
        poly, guards, ratio = load_scenario(fixture_path(name))
        _scenarios[name] = (Scenario(poly, guards, name=name), ratio)
    return _scenarios[name]


def get_speedratio(name: str) -> SpeedRatioResult:
    """Cached max_speed_ratio result (the most expensive fixture artifact)."""
    if name not in _speedratios:
        scn, _ = get_scenario(name)
        _speedratios[name] = max_speed_ratio(scn)
    return _speedratios[name]
