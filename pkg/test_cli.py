"""
CLI and run persistence: exit codes, deterministic outputs, trace round trips
"""
import json

import numpy as np
import pytest

from pancake_lab import main as cli
from pancake_lab.config import RunConfig
from pancake_lab.curve_core import read_snapshot
from pancake_lab.errors import ConfigError, FlowError
from pancake_lab.run_manager import (
    EVENT_LOG,
    MANIFEST,
    RunManager,
    load_shoot_result,
    load_trace,
    snapshot_name,
    write_shoot_result,
    write_trace,
)
from pancake_lab.stack_shooter import ShootResult


def manifest(run):
    return json.loads((run / MANIFEST).read_text(encoding='utf-8'))


# ==================== GEN ====================

def test_gen_is_byte_identical(tmp_path):
    a, b = tmp_path / 'a', tmp_path / 'b'
    assert cli.main(['--out', str(a), '--preset', 'dumbbell', 'gen']) == 0
    assert cli.main(['--out', str(b), '--preset', 'dumbbell', 'gen']) == 0
    for name in ('initial.csv', MANIFEST):
        assert (a / 'gen' / name).read_bytes() == (b / 'gen' / name).read_bytes()

    data = manifest(a / 'gen')
    assert data['command'] == 'gen'
    assert data['initial']['kind'] == 'dumbbell'
    assert data['initial']['m_achieved'] == pytest.approx(0.2, abs=1e-8)
    assert len(data['config_hash']) == 64


def test_gen_stacked_profile(tmp_path):
    assert cli.main(['--out', str(tmp_path), 'gen', '--m', '1.0']) == 0
    data = manifest(tmp_path / 'gen')
    assert data['initial']['kind'] == 'stacked'
    assert data['initial']['m_achieved'] == pytest.approx(1.0, abs=1e-8)
    curve = read_snapshot(tmp_path / 'gen' / 'initial.csv')
    assert curve.closed
    assert curve.height_at(0.0) == pytest.approx(1.0, abs=1e-8)


# ==================== EXIT CODES ====================

def test_invalid_neck_is_usage_error(tmp_path, capsys):
    assert cli.main(['--out', str(tmp_path), 'gen', '--m', '-1']) == 2
    assert "Invalid configuration" in capsys.readouterr().err


def test_carve_height_below_floor_is_usage_error(tmp_path, capsys):
    assert cli.main(['--out', str(tmp_path), 'gen', '--rho', '0.01']) == 2
    assert "rho=0.01 outside the valid interval (" in capsys.readouterr().err


def test_unreachable_neck_is_usage_error(tmp_path, capsys):
    # default desk pancake: g = 20, carving tops out just below it
    assert cli.main(['--out', str(tmp_path), 'gen', '--m', '19.99999']) == 2
    assert "outside the reachable interval (0, " in capsys.readouterr().err


def test_dumbbell_neck_is_checked(tmp_path, capsys):
    assert cli.main(['--out', str(tmp_path), '--preset', 'dumbbell', 'gen', '--m', '3.5']) == 2
    assert "reachable interval" in capsys.readouterr().err


def test_seedless_passes_clean_config(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv('PANCAKE_SEED', raising=False)
    assert cli.main(['--out', str(tmp_path), '--seedless', '--preset', 'dumbbell', 'gen']) == 0
    assert "seedless" in capsys.readouterr().out


def test_seedless_rejects_seed_variable(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv('PANCAKE_SEED', '7')
    assert cli.main(['--out', str(tmp_path), '--seedless', '--preset', 'dumbbell', 'gen']) == 2
    assert "configured by PANCAKE_SEED" in capsys.readouterr().err
    assert not (tmp_path / 'gen').exists()
    assert cli.main(['--out', str(tmp_path), '--preset', 'dumbbell', 'gen']) == 0


def test_missing_input_is_usage_error(tmp_path, capsys):
    code = cli.main(['--out', str(tmp_path), '--preset', 'sphere', 'evolve', '--input', str(tmp_path / 'nope.csv')])
    assert code == 2
    assert "Missing path" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert cli.main(['--config', str(tmp_path / 'none.json'), 'gen']) == 2


def test_library_failure_exit_code(tmp_path, monkeypatch, capsys):
    def broken(args, config):
        raise FlowError("step produced a non-finite node")

    monkeypatch.setitem(cli.COMMANDS, 'gen', broken)
    assert cli.main(['--out', str(tmp_path), 'gen']) == 1
    assert "FlowError" in capsys.readouterr().err


# ==================== EVOLVE / DIAGNOSE ====================

def test_evolve_and_diagnose_sphere(tmp_path):
    assert cli.main(['--out', str(tmp_path), '--preset', 'sphere', 'evolve']) == 0
    run = tmp_path / 'evolve'
    data = manifest(run)
    assert data['stop_reason'] == 'extinct'
    assert data['extinction_time'] == pytest.approx(1.0 / 6.0, rel=0.02)
    assert (run / EVENT_LOG).is_file()
    assert data['events']['extinction'] >= 1 and data['events']['topology'] == 0

    assert cli.main(['--out', str(tmp_path), '--preset', 'sphere', 'diagnose', '--trace', str(run)]) == 0
    report = json.loads((tmp_path / 'diagnose' / 'diagnostics.json').read_text(encoding='utf-8'))
    assert {'series', 'checks', 'skipped', 'avoidance', 'symmetry_defect'} <= set(report)
    assert report['avoidance'] and all(a['ok'] for a in report['avoidance'])
    assert (tmp_path / 'diagnose' / 'series.csv').is_file()


def test_diagnose_needs_trace_directory(tmp_path):
    assert cli.main(['--out', str(tmp_path), 'diagnose', '--trace', str(tmp_path / 'absent')]) == 2


@pytest.mark.slow
def test_classify_desk_neck(tmp_path):
    assert cli.main(['--out', str(tmp_path), '--preset', 'stack-desk', 'classify', '--m', '0.05']) == 0
    result = json.loads((tmp_path / 'classify' / 'classify.json').read_text(encoding='utf-8'))
    assert result['label'] == 'two-components'


# ==================== RUN MANAGER ====================

def test_run_manager(tmp_path):
    manager = RunManager(tmp_path, RunConfig())
    run = manager.create_run('gen')
    assert run.is_dir()
    assert manager.run_exists('gen') and not manager.run_exists('evolve')
    assert manager.get_run('gen') == run
    assert manager.create_run('stack/s_-5') == tmp_path / 'stack' / 's_-5'
    assert manager.get_active_count() == 2

    data = manager.manifest('gen', {'nodes': 10})
    assert data['nodes'] == 10
    assert data['config_hash'] == RunConfig().config_hash()
    assert set(data) == {'command', 'version', 'config', 'config_hash', 'nodes'}


def test_snapshot_name():
    assert snapshot_name(0.125, 3) == "0.125000000_3.csv"


# ==================== TRACE PERSISTENCE ====================

def test_trace_round_trip(tmp_path, unit_sphere_trace):
    loaded = load_trace(write_trace(tmp_path / 'trace', unit_sphere_trace))
    np.testing.assert_array_equal(loaded.times, unit_sphere_trace.times)
    assert loaded.events == unit_sphere_trace.events
    assert loaded.extinction_time == unit_sphere_trace.extinction_time
    assert loaded.stop_reason == unit_sphere_trace.stop_reason
    assert loaded.config == unit_sphere_trace.config
    np.testing.assert_array_equal(loaded.snapshots[0].components[0].points,
                                  unit_sphere_trace.snapshots[0].components[0].points)
    log = (tmp_path / 'trace' / EVENT_LOG).read_text(encoding='utf-8').splitlines()
    assert log == unit_sphere_trace.log_lines()


def test_load_trace_needs_index(tmp_path):
    with pytest.raises(ConfigError, match="no trace"):
        load_trace(tmp_path)


def test_shoot_result_round_trip(tmp_path, unit_sphere_trace):
    result = ShootResult(s=-5.0, threshold=4.0, tol_m=0.01, bracket=(1.0, 1.008), iterations=9,
                         anomalies=[(1.5, 1.2)], notes=["lifespan T=0.25 not above T=0.3 of s=-2"],
                         m_bar=1.044, T=0.25, neck_at_zero=0.3)
    result.recentered_trace = unit_sphere_trace.shifted(0.25)
    write_shoot_result(tmp_path, result)

    loaded = load_shoot_result(tmp_path)
    assert loaded.bracket == (1.0, 1.008)
    assert loaded.anomalies == [(1.5, 1.2)]
    assert loaded.notes == result.notes
    assert loaded.suspect
    assert loaded.m_bar == 1.044 and loaded.T == 0.25
    assert loaded.recentered_trace.offset == 0.25
    np.testing.assert_array_equal(loaded.recentered_trace.times, unit_sphere_trace.times - 0.25)

    with pytest.raises(ConfigError, match="expected one shoot result"):
        load_shoot_result(tmp_path / 'old_flow')
