"""Perpetual intruder tracking with diagonal guards in simple polygons.

Pipeline: triangulate the polygon, classify every triangle and guard from
the live coverage options, build per-guard critical regions (protected blobs,
internal/external curves, reaction bands) at a speed ratio, partition the
polygon into hybrid-automaton modes, and decide trackability either by
witness search or by the equivalent controlled-invariant-set fixpoint. On
top of that sit the maximum-speed-ratio computation with certificates, a
deterministic discrete-time simulator with adversary policies, a CLI, and a
websocket session service.
"""

from .analysis import AnalysisContext, Scenario, Witness
from .critical import CriticalComponent, CriticalRegion, build_region
from .geodesic import CurveField, GeodesicEngine, curve_to_curve
from .guards import (
    Classification,
    DuplicateGuard,
    GuardInfo,
    GuardSetError,
    HeuristicFailed,
    NotATriangulationEdge,
    UncoverableTriangle,
    classify,
    deploy_heuristic,
    validate_guard_set,
)
from .partition import (
    DegenerateArrangement,
    HybridAutomaton,
    Mode,
    RegionPartition,
    build_partition,
)
from .polygon import (
    OutsidePolygon,
    PolygonError,
    RepeatedVertex,
    SelfIntersection,
    SimplePolygon,
    TooFewVertices,
    Triangulation,
    ZeroArea,
    triangulate,
    validate_polygon,
)
from .reachability import (
    TrackabilityReport,
    find_unsafe_points,
    maximal_invariant_set,
    pre1,
    pre2,
    reach,
)
from .regions import AreaRegion, Polyline
from .simulate import (
    GreedyPolicy,
    NoWitness,
    ScriptPolicy,
    SimConfig,
    Simulator,
    TargetOutsidePolygon,
    Trace,
    WitnessPolicy,
    run,
    witness_adversary,
)
from .speedratio import (
    NoInternalCurves,
    SpeedRatioResult,
    max_speed_ratio,
    pairwise_ratio,
    ratio_unsafe_pairs,
    triangle_ratio,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
