"""
Diagnostics Module
Series extraction and the monotonicity, barrier and area laws checked on traces
"""
from .filters import Violation, ViolationFilter
from .series import SeriesReport, centred_rates, extract_series
from .laws import (
    LawCheck,
    area_rate_bound,
    area_rate_check,
    catenoid_crossing_check,
    csf_upper_barrier_check,
    entry_time,
    existence_time_check,
    flow_avoidance_check,
    inscribed_sphere_radius,
    monotone_checks,
    neck_boundedness_check,
    slab_containment,
    sphere_girth_check,
    symmetry_defect,
)

__all__ = [
    'Violation', 'ViolationFilter',
    'SeriesReport', 'extract_series', 'centred_rates',
    'LawCheck', 'area_rate_bound', 'area_rate_check', 'neck_boundedness_check',
    'csf_upper_barrier_check', 'flow_avoidance_check', 'slab_containment', 'symmetry_defect',
    'inscribed_sphere_radius', 'entry_time', 'existence_time_check', 'sphere_girth_check',
    'monotone_checks', 'catenoid_crossing_check',
]
