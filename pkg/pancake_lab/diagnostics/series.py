"""
Series Extraction
Time series of neck, height, extrema, areas and barrier intersections
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from pancake_lab.barriers import BarrierCurve
from pancake_lab.curve_core import (
    clipped_components,
    count_critical_points,
    count_intersections,
    enclosed_area_above,
    turning_number_above,
)
from pancake_lab.errors import CurveError
from pancake_lab.flow_engine import FlowState, FlowTrace
from .filters import Violation, ViolationFilter

logger = logging.getLogger("pancake_lab.diagnostics")


@dataclass
class SeriesReport:
    """All series share `times`; per-c and per-barrier series are keyed tables"""
    times: List[float]
    neck: List[float]
    max_height: List[float]
    girth: List[float]
    width: List[float]
    components: List[int]
    maxima: List[int]
    minima: List[int]
    areas: Dict[float, List[float]] = field(default_factory=dict)
    rates: Dict[float, List[Optional[float]]] = field(default_factory=dict)
    clipped: Dict[float, List[int]] = field(default_factory=dict)
    turning: Dict[float, List[float]] = field(default_factory=dict)
    sturm: Dict[str, List[Optional[int]]] = field(default_factory=dict)
    violations: List[Violation] = field(default_factory=list)

    @property
    def critical_totals(self) -> List[int]:
        return [a + b for a, b in zip(self.maxima, self.minima)]

    def to_frame(self) -> pd.DataFrame:
        """Flat table, one row per snapshot"""
        columns = {
            't': self.times, 'm': self.neck, 'M': self.max_height, 'girth': self.girth,
            'width': self.width, 'components': self.components,
            'maxima': self.maxima, 'minima': self.minima,
        }
        for c in sorted(self.areas):
            columns[f'area_{c:g}'] = self.areas[c]
            columns[f'rate_{c:g}'] = self.rates[c]
        for name in sorted(self.sturm):
            columns[f'sturm_{name}'] = self.sturm[name]
        return pd.DataFrame(columns)

    def to_dict(self) -> dict:
        return {
            'times': self.times,
            'neck': self.neck,
            'max_height': self.max_height,
            'girth': self.girth,
            'width': self.width,
            'components': self.components,
            'maxima': self.maxima,
            'minima': self.minima,
            'areas': {f'{c:g}': v for c, v in sorted(self.areas.items())},
            'rates': {f'{c:g}': v for c, v in sorted(self.rates.items())},
            'clipped': {f'{c:g}': v for c, v in sorted(self.clipped.items())},
            'turning': {f'{c:g}': v for c, v in sorted(self.turning.items())},
            'sturm': dict(sorted(self.sturm.items())),
            'violations': [v.to_dict() for v in self.violations],
        }


def centred_rates(times: Sequence[float], values: Sequence[float]) -> List[Optional[float]]:
    """Centred differences inside, one-sided at the ends; None for a single sample"""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(t) < 2:
        return [None] * len(t)
    return [float(r) for r in np.gradient(v, t)]


def _sturm_count(state: FlowState, barrier: BarrierCurve, tol: float) -> Optional[int]:
    if not barrier.alive(state.t) or not state.components:
        return None
    profile = barrier.profile(state.t)
    try:
        return sum(count_intersections(c, profile, tol).crossings for c in state.components)
    except CurveError:
        return None


def _increases(times: Sequence[float], values: Sequence[Optional[int]], law: str) -> List[Violation]:
    out = []
    previous = None
    for t, value in zip(times, values):
        if value is None:
            continue
        if previous is not None and value > previous:
            out.append(Violation(t, law, float(value - previous)))
        previous = value
    return out


def extract_series(trace: FlowTrace, barriers: Sequence[BarrierCurve] = (),
                   c_values: Sequence[float] = (), neck_x: float = 0.0) -> SeriesReport:
    """
    Series at every snapshot of a completed trace.

    Barrier cells outside a barrier's lifespan are None; monotonicity
    failures of the critical-point and intersection counts are listed as
    violations.
    """
    snaps = trace.snapshots
    times = [s.t for s in snaps]
    crit = [[count_critical_points(c) for c in s.components] for s in snaps]
    report = SeriesReport(
        times=times,
        neck=[s.neck_value(neck_x) for s in snaps],
        max_height=[s.max_height() for s in snaps],
        girth=[s.girth() for s in snaps],
        width=[s.width() for s in snaps],
        components=[s.count for s in snaps],
        maxima=[sum(cp.maxima for cp in row) for row in crit],
        minima=[sum(cp.minima for cp in row) for row in crit],
    )

    for c in c_values:
        report.areas[c] = [sum(enclosed_area_above(comp, c) for comp in s.components) for s in snaps]
        report.rates[c] = centred_rates(times, report.areas[c])
        report.clipped[c] = [sum(clipped_components(comp, c) for comp in s.components) for s in snaps]
        report.turning[c] = [max((turning_number_above(comp, c) for comp in s.components), default=0.0)
                             for s in snaps]

    tol = trace.config.spacing
    for barrier in barriers:
        report.sturm[barrier.name] = [_sturm_count(s, barrier, tol) for s in snaps]

    candidates = _increases(times, report.critical_totals, 'critical-points')
    for name, series in report.sturm.items():
        candidates.extend(_increases(times, series, f'sturm:{name}'))

    by_time = {s.t: s for s in snaps}
    kept = [v for v in ViolationFilter.clean(candidates)
            if ViolationFilter.validate(v, {'components': by_time[v.t].count})]
    report.violations = sorted(kept, key=lambda v: (v.t, v.law))
    for v in report.violations:
        logger.warning("violation %s at t=%.6g (magnitude %.4g)", v.law, v.t, v.magnitude)
    return report
