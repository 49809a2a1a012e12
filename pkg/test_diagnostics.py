"""
Diagnostics: series extraction, area-rate bound, barrier and existence-time laws
"""
import math

import pytest

from pancake_lab.barriers import catenoid_barrier, cylinder_barrier, pancake_slab, round_profile, sphere_barrier
from pancake_lab.config import ProfileKind, preset, validated
from pancake_lab.curve_core import ProfileGraph
from pancake_lab.diagnostics import (
    SeriesReport,
    Violation,
    ViolationFilter,
    area_rate_bound,
    area_rate_check,
    catenoid_crossing_check,
    centred_rates,
    csf_upper_barrier_check,
    existence_time_check,
    extract_series,
    flow_avoidance_check,
    inscribed_sphere_radius,
    monotone_checks,
    neck_boundedness_check,
    slab_containment,
    sphere_girth_check,
    symmetry_defect,
)
from pancake_lab.errors import DiagnosticsError
from pancake_lab.flow_engine import FlowConfig, FlowEngine, FlowState, FlowTrace
from pancake_lab.main import diagnose_barriers, initial_profile
from pancake_lab.pancake_model import make_dumbbell
from pancake_lab.stack_shooter import ShootResult, StackShooter


def bare_report(times, width, turning):
    report = SeriesReport(times=times, neck=[0.0] * len(times), max_height=[1.0] * len(times),
                          girth=[1.0] * len(times), width=width, components=[1] * len(times),
                          maxima=[1] * len(times), minima=[0] * len(times))
    report.areas[1.0] = [1.0] * len(times)
    report.rates[1.0] = [0.0] * len(times)
    report.clipped[1.0] = [1] * len(times)
    report.turning[1.0] = turning
    return report


# ==================== SERIES ====================

def test_centred_rates():
    assert centred_rates([0.0], [1.0]) == [None]
    assert centred_rates([0.0, 1.0, 3.0], [1.0, 3.0, 7.0]) == pytest.approx([2.0, 2.0, 2.0])


def test_sphere_area_rate_matches_closed_form(sphere3_trace):
    report = extract_series(sphere3_trace, c_values=(1.0,))
    for t, rate in zip(report.times, report.rates[1.0]):
        R = math.sqrt(9.0 - 6.0 * t)
        assert rate == pytest.approx(-6.0 * math.acos(1.0 / R), rel=0.03)
    assert report.rates[1.0][0] == pytest.approx(-7.386, rel=0.03)
    assert report.clipped[1.0][0] == 1


def test_series_heights_and_frame(sphere3_trace):
    report = extract_series(sphere3_trace, c_values=(1.0,))
    for t, M in zip(report.times, report.max_height):
        assert M == pytest.approx(math.sqrt(9.0 - 6.0 * t), rel=0.005)
    assert report.neck == pytest.approx(report.girth, rel=1e-3)
    assert set(report.components) == {1}
    assert not report.violations

    frame = report.to_frame()
    assert list(frame.columns[:3]) == ['t', 'm', 'M']
    assert 'area_1' in frame.columns and 'rate_1' in frame.columns
    assert len(frame) == len(report.times)
    assert set(report.to_dict()['areas']) == {'1'}


def test_sturm_series_for_inner_sphere(unit_sphere_trace):
    barrier = sphere_barrier(0.5, 3, spacing=0.02)
    report = extract_series(unit_sphere_trace, barriers=[barrier])
    counts = report.sturm[barrier.name]
    alive = [c for t, c in zip(report.times, counts) if barrier.alive(t)]
    assert alive and all(c == 0 for c in alive)
    assert counts[-1] is None
    assert f'sturm_{barrier.name}' in report.to_frame().columns
    assert all(check.passed for check in monotone_checks(report))


# ==================== AREA RATE ====================

def test_area_rate_bound_value():
    assert area_rate_bound(1.0, 6.0, 3, 1) == pytest.approx(2.0 * math.pi + 12.0)
    assert area_rate_bound(2.0, 6.0, 3, 2) == pytest.approx(2.0 * math.pi + 12.0)


def test_area_rate_check_passes_on_sphere(sphere3_trace):
    report = extract_series(sphere3_trace, c_values=(1.0,))
    check = area_rate_check(report, 1.0, 6.0, 3)
    assert check.passed
    assert check.margin > 10.0
    assert check.law == 'area-rate:1'


def test_area_rate_check_hypotheses(sphere3_trace):
    report = extract_series(sphere3_trace, c_values=(1.0,))
    with pytest.raises(DiagnosticsError, match="estimate inapplicable"):
        area_rate_check(report, 1.0, 4.0, 3)
    with pytest.raises(DiagnosticsError, match="no area series"):
        area_rate_check(report, 0.5, 6.0, 3)

    curled = bare_report([0.0, 1.0], [1.0, 1.0], [0.2, 1.2])
    with pytest.raises(DiagnosticsError, match="turning number"):
        area_rate_check(curled, 1.0, 2.0, 3)


# ==================== NECK BAND ====================

def old_flow(s, neck):
    config = FlowConfig.resolved(0.05)
    comp = round_profile(0.0, neck, 0.05)
    trace = FlowTrace(config=config, initial=FlowState(-1.0, (comp,)))
    trace.record(FlowState(-1.0, (comp,)))
    trace.record(FlowState(0.0, (comp,)))
    shot = ShootResult(s=s, threshold=4.0, tol_m=0.01)
    shot.recentered_trace = trace
    return shot


def test_neck_boundedness():
    results = [old_flow(-5.0, 1.0), old_flow(-10.0, 1.2)]
    check = neck_boundedness_check(results, (0.5, 2.0))
    assert check.passed
    assert check.margin == pytest.approx(0.5, abs=1e-3)
    assert check.details['comparison'][0]['min_shift'] == pytest.approx(0.2, abs=1e-3)

    failing = neck_boundedness_check(results, (1.1, 2.0))
    assert not failing.passed
    assert failing.violations[0].t == -5.0


# ==================== BARRIER LAWS ====================

def test_forced_flow_stays_below_curve_shortening(unit_sphere_trace):
    config = FlowConfig.resolved(0.02, n=3, max_time=0.1, snapshot_stride=0.01, forcing=False)
    unforced = FlowEngine(config).evolve(unit_sphere_trace.initial)
    check = csf_upper_barrier_check(unit_sphere_trace, unforced)
    assert check.passed


def test_slab_containment(sphere3_trace):
    assert slab_containment(sphere3_trace, -3.0, 3.0).passed
    assert not slab_containment(sphere3_trace, -2.5, 2.5).passed


def test_symmetry_defect(sphere3_trace):
    assert symmetry_defect(sphere3_trace) < sphere3_trace.config.spacing
    assert symmetry_defect(sphere3_trace, center=0.5) > 0.5


def test_catenoid_through_neck_crosses_twice():
    config = FlowConfig.resolved(0.025, n=3, max_time=0.005, snapshot_stride=0.0025)
    trace = FlowEngine(config).evolve(make_dumbbell(3.0, 0.2, 0.025))
    barrier = catenoid_barrier(3, 0.08, 6.0)
    check = catenoid_crossing_check(trace, barrier)
    assert check.passed
    assert check.details['initial'] == 2
    with pytest.raises(DiagnosticsError, match="not a catenoid"):
        catenoid_crossing_check(trace, pancake_slab(3.0))


# ==================== FLOW AVOIDANCE ====================

AVOIDANCE_CONFIG = FlowConfig.resolved(0.05, n=3, max_time=0.2, snapshot_stride=0.01)

# (left radius, right radius, gap) side by side, then (inner radius, inner centre) inside a radius-2 sphere
SIDE_BY_SIDE = [(0.5, 0.5, 0.3), (0.5, 1.0, 0.2), (0.8, 0.4, 0.5), (1.0, 1.0, 0.1), (0.6, 0.9, 0.4),
                (0.4, 0.7, 0.25)]
NESTED = [(0.5, 0.0), (0.8, 0.5), (0.6, -0.9), (0.4, 1.2)]


def avoidance_pairs():
    spacing = AVOIDANCE_CONFIG.spacing
    for left, right, gap in SIDE_BY_SIDE:
        yield round_profile(-left, left, spacing), round_profile(gap + right, right, spacing)
    for inner, centre in NESTED:
        yield round_profile(0.0, 2.0, spacing), round_profile(centre, inner, spacing)


def frozen_trace(config, centres):
    """Unit spheres placed at the given centre at t = 0, 0.1, ..."""
    trace = FlowTrace(config=config, initial=FlowState(0.0, (round_profile(centres[0], 1.0, 0.05),)))
    for k, x in enumerate(centres):
        trace.record(FlowState(0.1 * k, (round_profile(x, 1.0, 0.05),)))
    return trace


def test_separate_spheres_keep_apart():
    config = FlowConfig.resolved(0.05, n=3, max_time=0.1, snapshot_stride=0.005)
    engine = FlowEngine(config)
    a = engine.evolve(round_profile(-1.0, 0.5, 0.05))
    b = engine.evolve(round_profile(1.0, 0.5, 0.05))
    check = flow_avoidance_check(a, b)
    assert check.passed
    assert check.details['initial'] == pytest.approx(1.0, abs=1e-12)
    assert check.details['final'] > 1.0
    assert check.details['matched'] >= 5


def test_flow_avoidance_catches_approach():
    config = FlowConfig.resolved(0.05, n=3)
    a = frozen_trace(config, [0.0, 0.0])
    b = frozen_trace(config, [3.0, 2.5])
    check = flow_avoidance_check(a, b)
    assert not check.passed
    assert check.margin == pytest.approx(-0.4, abs=1e-9)


def test_flow_avoidance_hypotheses():
    config = FlowConfig.resolved(0.05, n=3)
    with pytest.raises(DiagnosticsError, match="not disjoint"):
        flow_avoidance_check(frozen_trace(config, [0.0]), frozen_trace(config, [1.5]))
    other = FlowConfig.resolved(0.05, n=4)
    with pytest.raises(DiagnosticsError, match="same config"):
        flow_avoidance_check(frozen_trace(config, [0.0]), frozen_trace(other, [3.0]))


@pytest.mark.slow
@pytest.mark.parametrize("index", range(len(SIDE_BY_SIDE) + len(NESTED)))
def test_disjoint_pairs_stay_apart(index):
    first, second = list(avoidance_pairs())[index]
    engine = FlowEngine(AVOIDANCE_CONFIG)
    check = flow_avoidance_check(engine.evolve(first), engine.evolve(second))
    assert check.passed, check.violations
    assert check.details['matched'] > 1


# ==================== EXISTENCE TIME ====================

def test_inscribed_sphere():
    radius, center = inscribed_sphere_radius(round_profile(2.0, 1.5, 0.01))
    assert radius == pytest.approx(1.5, rel=1e-3)
    assert center == pytest.approx(2.0, abs=1e-3)


def test_inscribed_sphere_needs_closed_profile():
    x = [float(i) for i in range(10)]
    with pytest.raises(DiagnosticsError):
        inscribed_sphere_radius(ProfileGraph(x, [1.0] * 10, (False, False)))


def test_existence_time(unit_sphere_trace):
    check = existence_time_check(unit_sphere_trace)
    assert check.passed
    assert check.details['r0'] == pytest.approx(1.0, rel=1e-3)
    assert check.details['entry'] == pytest.approx(0.125, rel=0.05)
    with pytest.raises(DiagnosticsError):
        existence_time_check(unit_sphere_trace, R=2.0)


def test_existence_time_needs_entry(mini_config):
    joined = StackShooter(mini_config).joined_profile(-5.0, m=1.0)
    trace = FlowEngine(mini_config.flow).evolve(joined, max_time=0.05)
    with pytest.raises(DiagnosticsError, match="never enters C_R"):
        existence_time_check(trace)


@pytest.mark.slow
def test_existence_time_on_stacked_run(mini_config):
    joined = StackShooter(mini_config).joined_profile(-5.0, m=3.0)
    trace = FlowEngine(mini_config.flow).evolve(joined)
    check = existence_time_check(trace)
    assert check.passed
    assert check.details['entry'] >= check.details['bound']


def test_sphere_girth_law(sphere3_trace):
    report = extract_series(sphere3_trace)
    assert sphere_girth_check(report, 3.0, 3, slack=0.05).passed


# ==================== SUITES ====================

SUITE_FLOW = {'n': 3, 'spacing': 0.05, 'pinch_eps': 0.2, 'tip_eps': 0.2, 'max_time': 0.5,
              'snapshot_stride': 0.05}
COARSE_FLOW = {**SUITE_FLOW, 'spacing': 0.1, 'pinch_eps': 0.4, 'tip_eps': 0.4}
MINI_PANCAKE = {'width': 2.0, 'girth_offset': 1.0, 'gap_half': 0.5}


def suite_configs():
    """Presets plus fixed grids of spheres, cylinders, dumbbells and glued pancakes"""
    configs = [
        preset('sphere'),
        preset('cylinder', flow={**COARSE_FLOW, 'max_time': 1.0, 'snapshot_stride': 0.1}),
        preset('dumbbell', flow={'spacing': 0.025, 'pinch_eps': 0.1, 'tip_eps': 0.1, 'max_time': 0.3,
                                 'snapshot_stride': 0.05}),
    ]
    configs += [validated({'flow': {**SUITE_FLOW, 'max_time': 0.7}, 'profile': {'kind': 'sphere', 'radius': r}})
                for r in (0.5, 1.5, 2.0)]
    configs += [validated({'flow': COARSE_FLOW, 'profile': {'kind': 'cylinder', 'radius': r, 'half_length': 3.0}})
                for r in (2.0, 4.0)]
    configs += [validated({'flow': SUITE_FLOW, 'profile': {'kind': 'dumbbell', 'radius': r, 'm': m}})
                for r, m in ((2.0, 0.3), (2.0, 0.5), (2.0, 0.8), (3.0, 0.5))]
    configs += [validated({'flow': SUITE_FLOW, 'pancake': MINI_PANCAKE, 'profile': {'kind': 'stacked', 'm': m}})
                for m in (0.3, 0.6, 1.0, 1.5, 2.5, 4.0)]
    configs += [validated({'flow': SUITE_FLOW, 'pancake': {**MINI_PANCAKE, **change},
                           'profile': {'kind': 'stacked', 'm': 1.0}})
                for change in ({'width': 3.0}, {'girth_offset': 2.0})]
    return configs


@pytest.mark.slow
@pytest.mark.parametrize("index", range(20))
def test_sturm_and_critical_point_suite(index):
    config = suite_configs()[index]
    curve, _ = initial_profile(config)
    trace = FlowEngine(config.flow).evolve(curve)
    barriers = diagnose_barriers(trace, config)
    p = config.profile
    if p.kind is ProfileKind.CYLINDER:
        barriers.append(cylinder_barrier(0.5 * p.radius, config.n, -p.half_length, p.half_length,
                                         spacing=config.flow.spacing))
    report = extract_series(trace, barriers)
    checks = monotone_checks(report)
    assert checks[0].law == 'critical-points'
    assert all(c.passed for c in checks), [v for c in checks for v in c.violations]
    assert len(report.sturm) == len(barriers)


@pytest.mark.slow
def test_area_rate_on_stacked_run(mini_config):
    shooter = StackShooter(mini_config)
    trace = shooter.engine.evolve(shooter.joined_profile(-5.0, m=3.0), max_time=1.0)
    start = trace.snapshots[0]
    x_lo, x_hi = start.components[0].nodes[0], start.components[-1].nodes[-1]
    c_values = [f * start.girth() for f in mini_config.diagnostics.c_fractions]
    report = extract_series(trace, c_values=c_values)
    for c in c_values:
        check = area_rate_check(report, c, x_hi - x_lo, 3)
        assert check.passed, check.violations


# ==================== FILTERS ====================

def test_violation_filters():
    items = [Violation(0.0, 'a', 1.0), Violation(0.0, 'a', 2.0), Violation(1.0, 'b', 0.01)]
    assert ViolationFilter.remove_duplicates(items) == [items[0], items[2]]
    assert ViolationFilter.apply_slack(items, slack=0.1) == items[:2]
    assert ViolationFilter.clean(items, slack=0.1) == [items[0]]

    assert not ViolationFilter.validate(items[0], {'components': 0})
    assert not ViolationFilter.validate(Violation(0.0, 'sturm:x', 1.0), {'barrier_alive': False})
    assert ViolationFilter.validate(items[0], {'components': 2})
