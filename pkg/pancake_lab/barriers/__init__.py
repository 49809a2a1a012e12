"""
Barrier Zoo
Exact and shooting-built comparison solutions for avoidance checks
"""
from .barrier import BarrierCurve, BarrierKind
from .solutions import (
    catenoid_barrier,
    catenoid_half_width,
    catenoid_profile,
    catenoid_speed_residual,
    cylinder_barrier,
    frozen_profile,
    grim_forcing_deficit,
    grim_rotation_profile,
    pancake_slab,
    round_profile,
    shrinking_cylinder,
    shrinking_sphere,
    sphere_barrier,
)
from .torus import (
    TorusProfile,
    mean_curvature,
    shrinker_residual,
    slice_speed_defect,
    torus_barrier,
    torus_shrinker_profile,
)
from .avoidance import AvoidanceReport, AvoidanceSample, AvoidanceViolation, avoidance_check

__all__ = [
    'BarrierCurve', 'BarrierKind',
    'shrinking_sphere', 'shrinking_cylinder', 'round_profile', 'sphere_barrier', 'cylinder_barrier',
    'catenoid_half_width', 'catenoid_profile', 'catenoid_speed_residual', 'catenoid_barrier',
    'grim_rotation_profile', 'grim_forcing_deficit', 'pancake_slab', 'frozen_profile',
    'TorusProfile', 'torus_shrinker_profile', 'torus_barrier',
    'mean_curvature', 'shrinker_residual', 'slice_speed_defect',
    'AvoidanceReport', 'AvoidanceSample', 'AvoidanceViolation', 'avoidance_check',
]
