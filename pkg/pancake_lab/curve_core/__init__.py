"""
Curve Core Module
Profile curve types and the geometric primitives every other module consumes
"""
from .curves import ParamCurve, ProfileGraph
from .region import Region
from .geometry import (
    CriticalPoints,
    HausdorffResult,
    IntersectionCount,
    clipped_components,
    count_critical_points,
    count_intersections,
    curvature_at,
    enclosed_area_above,
    graph_second_derivative,
    hausdorff_distance,
    menger_curvature,
    min_distance,
    to_polygon,
    turning_number_above,
)
from .resample import resample
from .io import read_param_curve, read_snapshot, write_snapshot

__all__ = [
    'ProfileGraph', 'ParamCurve', 'Region',
    'IntersectionCount', 'CriticalPoints', 'HausdorffResult',
    'curvature_at', 'graph_second_derivative', 'menger_curvature',
    'count_intersections', 'count_critical_points',
    'enclosed_area_above', 'clipped_components', 'turning_number_above', 'to_polygon',
    'hausdorff_distance', 'min_distance', 'resample',
    'write_snapshot', 'read_snapshot', 'read_param_curve',
]
