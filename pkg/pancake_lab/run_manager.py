"""
Run Manager
Run directories, deterministic manifests and trace persistence
"""
import json
import logging
import threading
from pathlib import Path
from typing import Dict, List, Optional, Union

from pancake_lab import __version__
from pancake_lab.config import RunConfig
from pancake_lab.curve_core import read_snapshot, write_snapshot
from pancake_lab.errors import ConfigError
from pancake_lab.flow_engine import (
    ComponentTracker,
    FlowConfig,
    FlowEvent,
    FlowState,
    FlowStatus,
    FlowTrace,
)
from pancake_lab.stack_shooter import ShootResult

logger = logging.getLogger("pancake_lab.run_manager")

MANIFEST = 'manifest.json'
TRACE_INDEX = 'trace.json'
EVENT_LOG = 'events.log'


def dump_json(path: Path, data) -> Path:
    """Sorted keys, fixed indentation, trailing newline"""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + '\n', encoding='utf-8')
    return path


def snapshot_name(t: float, component_id: int) -> str:
    return f"{t:.9f}_{component_id}.csv"


class RunManager:
    """
    Owns the output root and the run directories created under it.

    Directories are claimed under a lock so fan-out workers never share one.
    """

    def __init__(self, root: Union[str, Path], config: RunConfig):
        self.root = Path(root)
        self.config = config
        self.runs: Dict[str, Path] = {}
        self.lock = threading.Lock()

    def create_run(self, name: str) -> Path:
        """Create (or reuse) <root>/<name>"""
        with self.lock:
            path = self.root / name
            path.mkdir(parents=True, exist_ok=True)
            self.runs[name] = path
            return path

    def run_exists(self, name: str) -> bool:
        with self.lock:
            return name in self.runs

    def get_run(self, name: str) -> Optional[Path]:
        with self.lock:
            return self.runs.get(name)

    def get_active_count(self) -> int:
        with self.lock:
            return len(self.runs)

    # ==================== MANIFESTS ====================

    def manifest(self, command: str, extra: Optional[dict] = None) -> dict:
        data = {
            'command': command,
            'version': __version__,
            'config': self.config.model_dump(mode='json'),
            'config_hash': self.config.config_hash(),
        }
        data.update(extra or {})
        return data

    def write_manifest(self, run: Path, command: str, extra: Optional[dict] = None) -> Path:
        """manifest.json with the canonical config echo and hash; no timestamps"""
        return dump_json(run / MANIFEST, self.manifest(command, extra))


# ==================== TRACES ====================

def write_trace(run: Union[str, Path], trace: FlowTrace) -> Path:
    """
    Snapshots as <t>_<component id>.csv, events.log lines, and trace.json
    holding exact times and the file index.
    """
    run = Path(run)
    run.mkdir(parents=True, exist_ok=True)
    tracker = ComponentTracker()
    index = []
    for snap in trace.snapshots:
        ids = tracker.update(list(snap.components))
        files = []
        for comp, cid in zip(snap.components, ids):
            name = snapshot_name(snap.t, cid)
            write_snapshot(run / name, comp)
            files.append(name)
        index.append({'t': snap.t, 'status': snap.status.value, 'files': files, 'ids': ids})

    lines = trace.log_lines()
    (run / EVENT_LOG).write_text(''.join(line + '\n' for line in lines), encoding='utf-8')
    dump_json(run / TRACE_INDEX, {
        'config': trace.config.model_dump(mode='json'),
        'snapshots': index,
        'events': [e.to_dict() for e in trace.events],
        'extinction_time': trace.extinction_time,
        'stop_reason': trace.stop_reason,
        'offset': trace.offset,
    })
    logger.info("trace written to %s (%d snapshots)", run, len(index))
    return run


def load_trace(run: Union[str, Path]) -> FlowTrace:
    """
    Rebuild a trace written by write_trace.

    Raises:
        ConfigError: the directory holds no trace index
    """
    run = Path(run)
    index_path = run / TRACE_INDEX
    if not index_path.is_file():
        raise ConfigError(f"no trace found in {run}")
    data = json.loads(index_path.read_text(encoding='utf-8'))

    snapshots: List[FlowState] = []
    for entry in data['snapshots']:
        comps = tuple(read_snapshot(run / name) for name in entry['files'])
        snapshots.append(FlowState(float(entry['t']), comps, FlowStatus(entry['status'])))
    if not snapshots:
        raise ConfigError(f"trace in {run} has no snapshots")

    return FlowTrace(
        config=FlowConfig(**data['config']),
        initial=snapshots[0],
        snapshots=snapshots,
        events=[FlowEvent.from_dict(e) for e in data['events']],
        extinction_time=data['extinction_time'],
        final=snapshots[-1],
        stop_reason=data['stop_reason'],
        offset=data['offset'],
    )


# ==================== SHOOT RESULTS ====================

def shoot_name(s: float) -> str:
    return f"shoot_{s:g}.json"


def write_shoot_result(run: Union[str, Path], result: ShootResult) -> Path:
    """shoot_<s>.json, plus the recentred trace under old_flow/ when built"""
    run = Path(run)
    if result.recentered_trace is not None:
        write_trace(run / 'old_flow', result.recentered_trace)
    return dump_json(run / shoot_name(result.s), result.to_dict())


def load_shoot_result(run: Union[str, Path]) -> ShootResult:
    """
    Read the single shoot_<s>.json of a run directory and its old flow.

    Raises:
        ConfigError: no or several result files
    """
    run = Path(run)
    found = sorted(run.glob('shoot_*.json'))
    if len(found) != 1:
        raise ConfigError(f"expected one shoot result in {run}, found {len(found)}")
    data = json.loads(found[0].read_text(encoding='utf-8'))
    trace = load_trace(run / 'old_flow') if (run / 'old_flow' / TRACE_INDEX).is_file() else None
    return ShootResult(
        s=data['s'], threshold=data['threshold'], tol_m=data['tol_m'],
        bracket=tuple(data['bracket']), iterations=data['iterations'],
        anomalies=[tuple(a) for a in data['anomalies']], notes=list(data['notes']),
        m_bar=data['m_bar'], T=data['T'], neck_at_zero=data['neck_at_zero'],
        recentered_trace=trace,
    )
