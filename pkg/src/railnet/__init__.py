"""Toy-railroad networks: one-way / two-way and functioning analysis."""

from railnet.classify import (
    ClassificationReport,
    CycleAnalysis,
    TrackClass,
    Verdict,
    analyze_cycle,
    classify,
    classify_by_angles,
    classify_by_components,
    classify_by_parity,
    oracle_enumerate,
    track_class,
)
from railnet.double_track import (
    Orientation,
    Polarity,
    build_double_track,
    extract_orientation,
    polarity_of,
    underlying_components,
)
from railnet.journey import SwitchPolicy, check_functioning, reachable_arcs, simulate
from railnet.model import EndKind, EndRef, RailNetwork, Track, Walk, branch_swap, is_railway_line, validate_network

__version__ = "0.1.0"

__all__ = [
    "ClassificationReport",
    "CycleAnalysis",
    "EndKind",
    "EndRef",
    "Orientation",
    "Polarity",
    "RailNetwork",
    "SwitchPolicy",
    "Track",
    "TrackClass",
    "Verdict",
    "Walk",
    "analyze_cycle",
    "branch_swap",
    "build_double_track",
    "check_functioning",
    "classify",
    "classify_by_angles",
    "classify_by_components",
    "classify_by_parity",
    "extract_orientation",
    "is_railway_line",
    "oracle_enumerate",
    "polarity_of",
    "reachable_arcs",
    "simulate",
    "track_class",
    "underlying_components",
    "validate_network",
]
