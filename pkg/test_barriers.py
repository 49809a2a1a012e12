"""
Barrier zoo: closed-form solutions, catenoid quadrature, torus shooting, avoidance
"""
import math

import numpy as np
import pytest

from pancake_lab.barriers import (
    BarrierKind,
    avoidance_check,
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
    slice_speed_defect,
    sphere_barrier,
    torus_barrier,
    torus_shrinker_profile,
)
from pancake_lab.barriers import solutions
from pancake_lab.curve_core import ParamCurve
from pancake_lab.errors import BarrierError


# ==================== SPHERE / CYLINDER ====================

def test_shrinking_sphere_radius():
    radius = shrinking_sphere(5.0, 3)
    assert radius(1.0) == pytest.approx(math.sqrt(19.0))
    assert radius.extinction == pytest.approx(25.0 / 6.0)
    with pytest.raises(BarrierError):
        radius(5.0)


def test_shrinking_cylinder_radius():
    radius = shrinking_cylinder(10.0, 3)
    assert radius(1.0) == pytest.approx(math.sqrt(96.0))
    assert radius.extinction == pytest.approx(25.0)


def test_sphere_barrier_lifespan():
    barrier = sphere_barrier(1.0, 3, spacing=0.05)
    assert barrier.exact and not barrier.static
    assert barrier.alive(-100.0)
    assert not barrier.alive(1.0 / 6.0)
    assert barrier.profile(0.1).max_height() == pytest.approx(math.sqrt(0.4), rel=1e-3)
    with pytest.raises(BarrierError, match="undefined"):
        barrier.profile(0.2)


def test_cylinder_barrier_profile():
    barrier = cylinder_barrier(2.0, 3, -1.0, 1.0, spacing=0.1)
    profile = barrier.profile(0.5)
    assert profile.closed_ends == (False, False)
    np.testing.assert_allclose(profile.heights, math.sqrt(2.0))
    with pytest.raises(BarrierError):
        cylinder_barrier(2.0, 3, 1.0, -1.0)


# ==================== CATENOID ====================

def test_catenoid_half_width():
    assert catenoid_half_width(3, 1.0) == pytest.approx(1.31103, abs=1e-4)
    assert catenoid_half_width(3, 2.0) == pytest.approx(2.0 * catenoid_half_width(3, 1.0), rel=1e-10)
    assert catenoid_half_width(4, 1.0) < catenoid_half_width(3, 1.0)


def test_planar_catenoid_has_no_slab():
    with pytest.raises(BarrierError, match="entire catenoid: no slab"):
        catenoid_half_width(2)


def test_catenoid_profile_shape():
    curve = catenoid_profile(3, 1.0, 20.0)
    middle = curve.size // 2
    assert tuple(curve.points[middle]) == (0.0, 1.0)
    assert not curve.closed
    assert curve.x[-1] < catenoid_half_width(3, 1.0)
    np.testing.assert_allclose(curve.x, -curve.x[::-1], atol=1e-15)


def test_catenoid_is_stationary():
    residual = catenoid_speed_residual(3, 1.0, 4.0, nodes=10001)
    assert residual.size == 10001 - 4
    assert np.abs(residual).max() < 1e-6
    assert np.abs(catenoid_speed_residual(5, 0.5, 5.0, nodes=10001)).max() < 1e-6


def test_distorted_catenoid_is_not_stationary(monkeypatch):
    exact = catenoid_profile(3, 1.0, 4.0, nodes=2001)
    stretched = ParamCurve(exact.points * np.array([1.02, 1.0]), closed=False)
    monkeypatch.setattr(solutions, 'catenoid_profile', lambda *args: stretched)
    assert np.abs(catenoid_speed_residual(3, 1.0, 4.0, nodes=2001)).max() > 1e-3


# ==================== GRIM ROTATION ====================

def test_grim_rotation_translates():
    barrier = grim_rotation_profile(0.1, 2.0)
    middle = barrier.profile(0.0).size // 2
    lift = barrier.profile(1.0).r[middle] - barrier.profile(0.0).r[middle]
    assert lift == pytest.approx(10.0, rel=1e-12)
    assert barrier.params['slab_width'] == pytest.approx(0.1 * math.pi)
    assert barrier.approximate and not barrier.exact


def test_grim_rotation_lifespan():
    barrier = grim_rotation_profile(0.1, 2.0)
    assert barrier.alive(-0.1)
    assert not barrier.alive(-0.2)
    with pytest.raises(BarrierError):
        grim_rotation_profile(0.1, 0.5)


def test_grim_forcing_deficit_bounded():
    barrier = grim_rotation_profile(0.1, 2.0, n=3)
    deficit = grim_forcing_deficit(barrier, 0.0)
    assert deficit.max() <= 2.0 / 2.0 + 1e-12
    assert deficit.min() > 0.0
    with pytest.raises(BarrierError):
        grim_forcing_deficit(pancake_slab(1.0), 0.0)


# ==================== STATIC PIECES ====================

def test_static_barriers(unit_sphere_trace):
    slab = pancake_slab(2.0)
    assert slab.static and slab.exact
    assert slab.kind is BarrierKind.PANCAKE_SLAB
    assert slab.name == "pancake-slab(center=0,half_width=2,height=1000)"

    frozen = frozen_profile(unit_sphere_trace.initial.components[0])
    assert frozen.static and not frozen.exact
    assert frozen.params['x_lo'] == pytest.approx(-1.0)


# ==================== TORUS SHRINKER ====================

@pytest.mark.slow
@pytest.mark.parametrize("n", [2, 3])
def test_torus_shrinker_closes(n):
    torus = torus_shrinker_profile(n)
    curve = torus.curve
    assert torus.closure_residual < 1e-8
    assert torus.shrinker_residual < 1e-6
    assert curve.closed
    assert curve.r.min() > 0.0
    assert np.count_nonzero(curve.x == 0.0) == 2
    np.testing.assert_allclose(np.sort(curve.x), np.sort(-curve.x), atol=1e-12)


@pytest.mark.slow
def test_torus_slices_move_by_mean_curvature():
    torus = torus_shrinker_profile(3)
    assert slice_speed_defect(torus.curve, 3, -1.0) < 1e-6
    assert slice_speed_defect(torus.curve, 3, -4.0) < 1e-6
    with pytest.raises(BarrierError):
        slice_speed_defect(torus.curve, 3, 0.0)

    barrier = torus_barrier(3, profile=torus)
    assert barrier.alive(-1.0) and not barrier.alive(0.0)
    assert barrier.profile(-4.0).r.max() == pytest.approx(2.0 * torus.curve.r.max())


# ==================== AVOIDANCE ====================

def test_inner_sphere_is_avoided(unit_sphere_trace):
    barrier = sphere_barrier(0.5, 3, spacing=0.02)
    report = avoidance_check(unit_sphere_trace, barrier)
    assert report.ok
    assert report.inside is True
    assert report.samples
    assert all(s.crossings == 0 for s in report.samples)
    assert report.to_dict()['barrier'] == barrier.name


def test_touching_barrier_is_rejected(unit_sphere_trace):
    crossing = sphere_barrier(1.0, 3, center_x=1.0, spacing=0.02)
    with pytest.raises(BarrierError, match="not a barrier configuration"):
        avoidance_check(unit_sphere_trace, crossing)


def test_avoidance_needs_exact_barrier(unit_sphere_trace):
    frozen = frozen_profile(round_profile(0.0, 3.0, 0.05))
    with pytest.raises(BarrierError, match="not an exact solution"):
        avoidance_check(unit_sphere_trace, frozen)
    with pytest.raises(BarrierError, match="not an exact solution"):
        avoidance_check(unit_sphere_trace, grim_rotation_profile(1.0, 5.0))


def test_barrier_must_be_alive(unit_sphere_trace):
    barrier = sphere_barrier(0.5, 3, spacing=0.02, t0=-10.0)
    with pytest.raises(BarrierError, match="never alive"):
        avoidance_check(unit_sphere_trace, barrier)
