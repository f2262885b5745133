"""Geometry, graph, optimizer, lift and bound helpers for h3bound."""

from .bounds import (
    BoundReport,
    ConstantSchedule,
    ScheduleEntry,
    chord_certifies,
    l0,
    lbar,
    lbar_closed_form,
    phi_max,
    r_n,
    schedule,
    short_cut_length,
    two_long_edges_threshold,
)
from .geometry import (
    BASEPOINT,
    W,
    Containment,
    Frame,
    GeodesicSegment,
    Horoball,
    HoroballMembership,
    HPoint,
    IdealPoint,
    LorentzIsometry,
    angle,
    busemann,
    chain_frame,
    chord_distance,
    dist,
    exp_map,
    horoball_contains,
    ideal_direction,
    ideal_endpoint,
    line_element_distance,
    log_map,
    plane_residual,
    point_segment_distance,
    ray_exit_length,
    segment_distance,
    thin_triangle_gap,
)
from .graphs import (
    DirectedEdgePath,
    GirthResult,
    LengthAssignment,
    TrivalentGraph,
    WindowCheckResult,
    canonical_code,
    catalog_lines,
    cyclic_window_maxima,
    edge_count,
    enumerate_by_pairings,
    enumerate_n_graphs,
    girth_length,
    random_reduced_closed_path,
    reduced_closed_paths,
    simple_cycles,
    two_long_edges_check,
    vertex_count,
    window_long_edge_check,
)
from .lift import (
    Case1,
    Case2,
    Contained,
    EmbeddingCheck,
    Escape,
    EscapeWitness,
    Geodesic120Path,
    LengthReduction,
    SegmentWindow,
    SelectionOracle,
    ShortCut,
    ShortCutCertificate,
    build_path,
    escapes_horoball,
    is_embedded,
    select_long_pair,
    select_long_pair_oracle,
    selection_window_radius,
    short_cut,
    trichotomy,
    validate_witness,
)
from .steiner import (
    CarrierConfig,
    CornerCut,
    RepairOutcome,
    VertexAngles,
    YReport,
    corner_shortcut,
    optimal_stars,
    optimize,
    star_candidates,
    stationarity_residual,
    total_length,
    y_report,
    zero_edge_repair,
)

__all__ = [
    "BASEPOINT",
    "BoundReport",
    "CarrierConfig",
    "Case1",
    "Case2",
    "ConstantSchedule",
    "Contained",
    "Containment",
    "CornerCut",
    "DirectedEdgePath",
    "EmbeddingCheck",
    "Escape",
    "EscapeWitness",
    "Frame",
    "Geodesic120Path",
    "GeodesicSegment",
    "GirthResult",
    "HPoint",
    "Horoball",
    "HoroballMembership",
    "IdealPoint",
    "LengthAssignment",
    "LengthReduction",
    "LorentzIsometry",
    "RepairOutcome",
    "ScheduleEntry",
    "SegmentWindow",
    "SelectionOracle",
    "ShortCut",
    "ShortCutCertificate",
    "TrivalentGraph",
    "VertexAngles",
    "W",
    "WindowCheckResult",
    "YReport",
    "angle",
    "build_path",
    "busemann",
    "canonical_code",
    "catalog_lines",
    "chain_frame",
    "chord_certifies",
    "chord_distance",
    "corner_shortcut",
    "cyclic_window_maxima",
    "dist",
    "edge_count",
    "enumerate_by_pairings",
    "enumerate_n_graphs",
    "escapes_horoball",
    "exp_map",
    "girth_length",
    "horoball_contains",
    "ideal_direction",
    "ideal_endpoint",
    "is_embedded",
    "l0",
    "lbar",
    "lbar_closed_form",
    "line_element_distance",
    "log_map",
    "optimal_stars",
    "optimize",
    "phi_max",
    "plane_residual",
    "point_segment_distance",
    "r_n",
    "random_reduced_closed_path",
    "ray_exit_length",
    "reduced_closed_paths",
    "schedule",
    "segment_distance",
    "select_long_pair",
    "select_long_pair_oracle",
    "selection_window_radius",
    "short_cut",
    "short_cut_length",
    "simple_cycles",
    "star_candidates",
    "stationarity_residual",
    "thin_triangle_gap",
    "total_length",
    "trichotomy",
    "two_long_edges_check",
    "two_long_edges_threshold",
    "validate_witness",
    "vertex_count",
    "window_long_edge_check",
    "y_report",
    "zero_edge_repair",
]
