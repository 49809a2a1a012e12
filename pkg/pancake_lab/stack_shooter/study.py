"""
Convergence Study
Hausdorff distances between consecutive old flows at matched times
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from pancake_lab.curve_core import Region, hausdorff_distance
from pancake_lab.errors import ShootError
from pancake_lab.flow_engine import FlowState
from .results import ShootResult


@dataclass
class StudyTable:
    """cells[p][k]: distance between pair p at times[k]; None where absent"""
    times: List[float]
    pairs: List[Tuple[float, float]]
    cells: List[List[Optional[float]]] = field(default_factory=list)

    @property
    def cauchy(self) -> List[Optional[float]]:
        """Max over sampled times per pair"""
        out = []
        for row in self.cells:
            present = [v for v in row if v is not None]
            out.append(max(present) if present else None)
        return out

    def latest_common(self) -> List[Optional[float]]:
        """Per pair, the distance at the latest time where every pair has a value"""
        for k in range(len(self.times) - 1, -1, -1):
            column = [row[k] for row in self.cells]
            if all(v is not None for v in column):
                return column
        return [None] * len(self.cells)

    def rows(self) -> List[dict]:
        out = []
        for (s_a, s_b), row in zip(self.pairs, self.cells):
            for t, value in zip(self.times, row):
                out.append({'s_a': s_a, 's_b': s_b, 't': t, 'hausdorff': value})
        return out

    def to_dict(self) -> dict:
        return {'times': self.times, 'pairs': [list(p) for p in self.pairs],
                'cells': self.cells, 'cauchy': self.cauchy}


def _slice_points(state: FlowState) -> np.ndarray:
    return np.vstack([c.points for c in state.components]) if state.components else np.empty((0, 2))


def common_times(results: Sequence[ShootResult], stride: float) -> List[float]:
    """Grid t = -k * stride covered by every recentred trace"""
    lifespans = [r.T for r in results if r.T is not None]
    if not lifespans:
        return []
    count = int(np.floor(min(lifespans) / stride + 1e-9))
    return [-k * stride for k in range(count, -1, -1)]


def convergence_study(results: Sequence[ShootResult], window: Region,
                      times: Optional[Sequence[float]] = None) -> StudyTable:
    """
    Raises:
        ShootError: window touches the axis, or a sample time is positive
    """
    if not window.off_axis:
        raise ShootError("window must stay away from the axis (r_lo > 0)")
    if times is None:
        stride = results[0].recentered_trace.config.snapshot_stride if results else 1.0
        times = common_times(results, stride)
    if any(t > 0 for t in times):
        raise ShootError("sample times must be <= 0")

    table = StudyTable(times=list(times), pairs=[(a.s, b.s) for a, b in zip(results, results[1:])])
    for a, b in zip(results, results[1:]):
        row = []
        for t in times:
            sa = a.recentered_trace.at(t) if a.recentered_trace is not None else None
            sb = b.recentered_trace.at(t) if b.recentered_trace is not None else None
            if sa is None or sb is None:
                row.append(None)
                continue
            distance = hausdorff_distance(_slice_points(sa), _slice_points(sb), window)
            row.append(distance.value)
        table.cells.append(row)
    return table
