"""
Pancake Model Module
Synthetic pancake profiles, girth/width laws and the glued neck construction
"""
from .shapes import CapShape, EllipticalCap, GrimReaperCap, build_shape
from .pancake import (
    CapStyle,
    GirthLaw,
    PancakeSpec,
    anneal,
    desk_girth,
    girth_asymptotic,
    make_pancake,
    profile_from_shape,
    symmetrized,
    width_asymptotic,
)
from .neck_join import (
    JoinedProfile,
    NeckGeometry,
    NeckJoinSpec,
    TangentArc,
    dumbbell_geometry,
    join,
    make_dumbbell,
    nesting_check,
    rho_floor,
)

__all__ = [
    'CapShape', 'EllipticalCap', 'GrimReaperCap', 'build_shape',
    'CapStyle', 'GirthLaw', 'PancakeSpec',
    'girth_asymptotic', 'width_asymptotic', 'desk_girth',
    'make_pancake', 'profile_from_shape', 'symmetrized', 'anneal',
    'NeckJoinSpec', 'JoinedProfile', 'NeckGeometry', 'TangentArc',
    'rho_floor', 'join', 'nesting_check', 'make_dumbbell', 'dumbbell_geometry',
]
