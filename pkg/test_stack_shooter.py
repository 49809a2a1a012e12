"""
Stack shooter: stop rule, classification, bisection bookkeeping, old flows, study tables
"""
import math

import pytest

from pancake_lab.barriers import round_profile
from pancake_lab.config import preset, validated
from pancake_lab.curve_core import Region
from pancake_lab.errors import ShootError
from pancake_lab.flow_engine import FlowConfig, FlowState, FlowTrace
from pancake_lab.stack_shooter import (
    Classification,
    Label,
    MaxHeightBelow,
    ShootResult,
    StackShooter,
    common_times,
    convergence_study,
    monotonicity_anomalies,
    threshold_time,
)

CRITICAL = 1.234


def with_shoot(config, **shoot):
    data = config.model_dump(mode='json')
    data['shoot'].update(shoot)
    return validated(data)


def step_labels(critical=CRITICAL):
    """Fake classify: two components below the critical neck, one above"""
    def fake(m, s, threshold=None):
        label = Label.TWO if m < critical else Label.ONE
        return Classification(m, label, T_m=None if label is Label.TWO else 10.0 - m)
    return fake


def sphere_state(t, radius):
    return FlowState(t, (round_profile(0.0, radius, 0.05),))


# ==================== STOP RULE ====================

def test_max_height_stop_rule():
    state = sphere_state(0.0, 1.0)
    assert MaxHeightBelow(1.5)(state)
    assert not MaxHeightBelow(0.5)(state)

    split = FlowState(0.0, (round_profile(-2.0, 1.0, 0.05), round_profile(2.0, 1.0, 0.05)))
    assert MaxHeightBelow(0.5)(split)
    assert not MaxHeightBelow(0.5, stop_on_pinch=False)(split)


def test_threshold_time_interpolates():
    trace = FlowTrace(config=FlowConfig(), initial=sphere_state(0.0, 2.0))
    trace.pre_stop = sphere_state(0.0, 2.0)
    trace.final = sphere_state(1.0, 1.0)
    assert threshold_time(trace, 1.5) == pytest.approx(0.5, rel=1e-6)

    trace.pre_stop = None
    assert threshold_time(trace, 1.5) == 1.0


# ==================== CLASSIFY ====================

def test_thin_neck_splits(mini_config):
    result = StackShooter(mini_config).classify(0.05, -5.0)
    assert result.label is Label.TWO
    assert result.T_m is None


def test_threshold_must_be_below_girth(mini_config):
    with pytest.raises(ShootError, match="not below the initial girth"):
        StackShooter(mini_config).classify(1.0, -5.0, threshold=100.0)


@pytest.mark.slow
def test_fat_neck_stays_connected(mini_config):
    shooter = StackShooter(mini_config)
    girth = mini_config.pancake_spec(-5.0).girth_g
    result = shooter.classify(0.9 * girth, -5.0)
    assert result.label is Label.ONE
    assert result.T_m > 0.0
    assert result.trace.final.max_height() <= mini_config.threshold()


@pytest.mark.slow
def test_desk_dichotomy():
    shooter = StackShooter(preset('stack-desk'))
    assert shooter.config.pancake_spec(-5.0).girth_g == 20.0
    assert shooter.classify(0.05, -5.0).label is Label.TWO
    fat = shooter.classify(18.0, -5.0)
    assert fat.label is Label.ONE
    assert fat.T_m > 0.0


# ==================== BISECT ====================

def test_bisection_brackets_critical_neck(mini_config, monkeypatch):
    shooter = StackShooter(mini_config)
    monkeypatch.setattr(shooter, 'classify', step_labels())
    result = shooter.bisect(-5.0, 0.1, 5.0, tol_m=1e-3)

    lo, hi = result.bracket
    assert lo <= CRITICAL <= hi
    assert result.width < 1e-3
    assert result.iterations <= math.ceil(math.log2(4.9 / 1e-3))
    assert result.m_star == pytest.approx(CRITICAL, abs=1e-3)
    assert not result.suspect
    assert result.to_dict()['m_star'] == result.m_star


def test_default_bracket_and_tolerance(mini_config, monkeypatch):
    shooter = StackShooter(mini_config)
    monkeypatch.setattr(shooter, 'classify', step_labels())
    result = shooter.bisect(-5.0)
    girth = mini_config.pancake_spec(-5.0).girth_g
    assert result.tol_m == pytest.approx(1e-3 * girth)
    assert result.samples[0].m == pytest.approx(0.0025 * girth)
    assert result.samples[1].m == pytest.approx(0.9 * girth)


def test_invalid_bracket(mini_config, monkeypatch):
    shooter = StackShooter(mini_config)
    monkeypatch.setattr(shooter, 'classify', step_labels(critical=0.0))
    with pytest.raises(ShootError, match="invalid bracket") as excinfo:
        shooter.bisect(-5.0, 0.1, 5.0)
    low, high = excinfo.value.witnesses
    assert low.label is Label.ONE and high.label is Label.ONE
    with pytest.raises(ShootError, match="invalid bracket"):
        shooter.bisect(-5.0, 2.0, 1.0)


def test_undetermined_sample_stops_bisection(mini_config, monkeypatch):
    shooter = StackShooter(mini_config)

    def fake(m, s, threshold=None):
        if 1.0 < m < 2.0:
            return Classification(m, Label.UNDETERMINED, reason='blown-up')
        return Classification(m, Label.TWO if m <= 1.0 else Label.ONE)

    monkeypatch.setattr(shooter, 'classify', fake)
    with pytest.raises(ShootError, match="undetermined") as excinfo:
        shooter.bisect(-5.0, 0.1, 5.0, tol_m=1e-3)
    assert excinfo.value.samples[-1].label is Label.UNDETERMINED


def test_undetermined_interior_sample_stops_bisection(mini_config, monkeypatch):
    shooter = StackShooter(with_shoot(mini_config, probes=3))
    seen = []

    def fake(m, s, threshold=None):
        seen.append(m)
        if 2.0 < m < 3.0:
            return Classification(m, Label.UNDETERMINED, reason='max-time')
        return step_labels()(m, s, threshold)

    monkeypatch.setattr(shooter, 'classify', fake)
    with pytest.raises(ShootError, match="undetermined classification at m=2.5") as excinfo:
        shooter.bisect(-5.0, 0.5, 4.5, tol_m=1e-3)
    assert excinfo.value.witnesses[0].label is Label.UNDETERMINED
    # interior samples at 1.5 and 2.5, no bisection step afterwards
    assert seen == pytest.approx([0.5, 4.5, 1.5, 2.5])


def test_iteration_cap(mini_config, monkeypatch):
    shooter = StackShooter(with_shoot(mini_config, max_iterations=3))
    monkeypatch.setattr(shooter, 'classify', step_labels())
    with pytest.raises(ShootError, match="exceeded 3 iterations"):
        shooter.bisect(-5.0, 0.1, 5.0, tol_m=1e-6)


def test_probes_flag_non_monotone_labels(mini_config, monkeypatch):
    shooter = StackShooter(with_shoot(mini_config, probes=4))

    def fake(m, s, threshold=None):
        two = m < 1.0 or 3.0 < m < 3.5
        return Classification(m, Label.TWO if two else Label.ONE)

    monkeypatch.setattr(shooter, 'classify', fake)
    result = shooter.bisect(-5.0, 0.1, 5.0, tol_m=1e-2)
    assert result.suspect
    assert any(two_m == pytest.approx(3.04) for two_m, _ in result.anomalies)


def test_monotonicity_anomalies():
    samples = [Classification(m, label) for m, label in (
        (0.5, Label.TWO), (1.0, Label.ONE), (1.5, Label.TWO), (2.0, Label.UNDETERMINED), (3.0, Label.ONE),
    )]
    assert monotonicity_anomalies(samples) == [(1.5, 1.0)]
    assert monotonicity_anomalies(samples[:2]) == []


# ==================== OLD FLOWS ====================

def test_run_schedule_keeps_order(mini_config, monkeypatch):
    shooter = StackShooter(mini_config)

    def fake(i, schedule=None, delta=None, result=None):
        shot = ShootResult(s=schedule[i], threshold=4.0, tol_m=0.01)
        shot.T = 10.0 * (i + 1)
        return shot

    monkeypatch.setattr(shooter, 'build_old_flow', fake)
    results = shooter.run_schedule([-5.0, -10.0, -20.0], threads=3)
    assert [r.s for r in results] == [-5.0, -10.0, -20.0]
    assert [r.T for r in results] == [10.0, 20.0, 30.0]


def test_unordered_lifespans_mark_suspect(mini_config, monkeypatch):
    shooter = StackShooter(mini_config)

    def fake(i, schedule=None, delta=None, result=None):
        shot = ShootResult(s=schedule[i], threshold=4.0, tol_m=0.01)
        shot.T = [10.0, 8.0, 30.0][i]
        return shot

    monkeypatch.setattr(shooter, 'build_old_flow', fake)
    results = shooter.run_schedule([-5.0, -10.0, -20.0], threads=1)
    assert [r.suspect for r in results] == [False, True, False]
    assert results[1].notes == ["lifespan T=8 not above T=10 of s=-5"]
    assert results[1].to_dict()['suspect']


def test_neck_outside_band_marks_suspect(mini_config, monkeypatch):
    shooter = StackShooter(with_shoot(mini_config, band=[10.0, 20.0], band_unit=1.0))
    monkeypatch.setattr(shooter, 'classify',
                        lambda m, s, threshold=None: Classification(m, Label.ONE, T_m=0.05))
    shot = ShootResult(s=-5.0, threshold=4.0, tol_m=0.01, bracket=(0.99, 1.01))
    built = shooter.build_old_flow(0, [-5.0], result=shot)
    assert built.m_bar == pytest.approx(1.04)
    assert built.neck_at_zero < 10.0
    assert built.suspect and not built.anomalies
    assert built.notes[0].startswith("neck ")
    assert "outside band (10, 20)" in built.notes[0]


@pytest.mark.slow
def test_old_flow_is_recentred(mini_config):
    shooter = StackShooter(mini_config)
    shot = shooter.bisect(-5.0, tol_m=0.02)
    built = shooter.build_old_flow(0, [-5.0], result=shot)
    assert built.m_bar == pytest.approx(shot.m_star + 4.0 * shot.tol_m)
    assert built.T > 0.0
    assert built.recentered_trace.final.t == pytest.approx(0.0, abs=1e-9)
    assert built.recentered_trace.offset == pytest.approx(built.T)
    assert built.neck_at_zero > 0.0
    assert built.recentered_trace.times.min() == pytest.approx(-built.T, abs=1e-9)


# ==================== CONVERGENCE STUDY ====================

def recentred(s, T):
    config = FlowConfig.resolved(0.05, snapshot_stride=0.05)
    trace = FlowTrace(config=config, initial=sphere_state(-T, 1.0))
    trace.record(sphere_state(-T, 1.0))
    trace.record(sphere_state(0.0, 1.0))
    shot = ShootResult(s=s, threshold=4.0, tol_m=0.01)
    shot.T = T
    shot.recentered_trace = trace
    return shot


def test_common_times():
    results = [recentred(-5.0, 0.1), recentred(-10.0, 0.2)]
    assert common_times(results, 0.05) == pytest.approx([-0.1, -0.05, 0.0])


def test_identical_flows_have_zero_distance():
    results = [recentred(-5.0, 0.1), recentred(-10.0, 0.1)]
    table = convergence_study(results, Region.above(0.1))
    assert table.pairs == [(-5.0, -10.0)]
    assert table.cells == [[0.0, None, 0.0]]
    assert table.cauchy == [0.0]
    assert table.latest_common() == [0.0]
    assert len(table.rows()) == 3


def test_study_window_and_times_checked():
    results = [recentred(-5.0, 0.1), recentred(-10.0, 0.1)]
    with pytest.raises(ShootError, match="axis"):
        convergence_study(results, Region.everywhere())
    with pytest.raises(ShootError, match="<= 0"):
        convergence_study(results, Region.above(0.1), times=[0.5])
