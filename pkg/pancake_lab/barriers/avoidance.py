"""
Avoidance Check
Track distance and intersections between a flow trace and a barrier
"""
import logging
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np
import shapely

from pancake_lab.curve_core import Region, count_intersections, min_distance, to_polygon
from pancake_lab.errors import BarrierError, CurveError
from pancake_lab.flow_engine import FlowState, FlowTrace
from .barrier import BarrierCurve

logger = logging.getLogger("pancake_lab.barriers")

SLACK_SPACINGS = 2.0


@dataclass(frozen=True)
class AvoidanceSample:
    t: float
    distance: Optional[float]
    crossings: int
    contacts: int
    depth: float

    @property
    def intersections(self) -> int:
        return self.crossings + self.contacts


@dataclass(frozen=True)
class AvoidanceViolation:
    t: float
    kind: str
    value: float


@dataclass
class AvoidanceReport:
    barrier: str
    approximate: bool
    inside: Optional[bool]
    samples: List[AvoidanceSample] = field(default_factory=list)
    violations: List[AvoidanceViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def intersection_counts(self) -> List[int]:
        return [s.intersections for s in self.samples]

    def to_dict(self) -> dict:
        return {
            'barrier': self.barrier,
            'approximate': self.approximate,
            'inside': self.inside,
            'samples': [asdict(s) for s in self.samples],
            'violations': [asdict(v) for v in self.violations],
        }


def _union(state: FlowState):
    return shapely.union_all([to_polygon(c) for c in state.components])


def _count(state: FlowState, profile, tol: float):
    crossings = contacts = 0
    for comp in state.components:
        hits = count_intersections(comp, profile, tol)
        crossings += hits.crossings
        contacts += hits.contacts
    return crossings, contacts


def _distance(state: FlowState, profile, window: Region) -> Optional[float]:
    values = [d for d in (min_distance(c, profile, window) for c in state.components) if d is not None]
    return min(values) if values else None


def _depth(region, nodes: np.ndarray, inside: Optional[bool]) -> float:
    """Farthest a barrier node sits on the wrong side of the flow boundary"""
    if inside is None or len(nodes) == 0 or region.is_empty:
        return 0.0
    contained = shapely.contains_xy(region, nodes[:, 0], nodes[:, 1])
    wrong = nodes[~contained] if inside else nodes[contained]
    if len(wrong) == 0:
        return 0.0
    target = region if inside else region.boundary
    return float(shapely.distance(target, shapely.points(wrong)).max())


def avoidance_check(trace: FlowTrace, barrier: BarrierCurve, window: Optional[Region] = None,
                    expect_disjoint: bool = True) -> AvoidanceReport:
    """
    Per-snapshot minimum distance, intersection count and penetration depth.

    Args:
        trace: evolution to compare against
        barrier: comparison solution
        window: region the comparison is restricted to
        expect_disjoint: the barrier must start disjoint from the flow

    Raises:
        BarrierError: the barrier is not an exact solution, or it meets the
            initial curves ("not a barrier configuration")
    """
    if not barrier.exact or barrier.approximate:
        raise BarrierError(f"{barrier.name} is not an exact solution; avoidance needs one")
    window = window or Region.everywhere()
    spacing = trace.config.spacing
    slack = SLACK_SPACINGS * spacing
    report = AvoidanceReport(barrier=barrier.name, approximate=barrier.approximate, inside=None)

    initial_distance = None
    first = True
    for snap in trace.snapshots:
        if not barrier.alive(snap.t) or not snap.components:
            continue
        profile = barrier.profile(snap.t)
        nodes = window.clip(np.asarray(profile.points, dtype=float))
        try:
            crossings, contacts = _count(snap, profile, spacing)
        except CurveError as exc:
            if first:
                raise BarrierError("not a barrier configuration") from exc
            report.violations.append(AvoidanceViolation(snap.t, 'overlap', float('nan')))
            continue
        region = _union(snap)

        if first:
            if expect_disjoint and crossings + contacts:
                raise BarrierError("not a barrier configuration")
            if len(nodes):
                report.inside = bool(shapely.contains_xy(region, nodes[:, 0], nodes[:, 1]).mean() >= 0.5)
            initial_distance = _distance(snap, profile, window)
            first = False

        distance = _distance(snap, profile, window)
        depth = _depth(region, nodes, report.inside)
        report.samples.append(AvoidanceSample(snap.t, distance, crossings, contacts, depth))

        if depth > slack:
            report.violations.append(AvoidanceViolation(snap.t, 'penetration', depth))
        if (expect_disjoint and distance is not None and initial_distance is not None
                and distance < initial_distance - slack):
            report.violations.append(AvoidanceViolation(snap.t, 'distance-drop', distance))

    if first:
        raise BarrierError("barrier never alive on a recorded snapshot")
    for v in report.violations:
        logger.warning("avoidance %s at t=%.6g (%s=%.4g)", barrier.name, v.t, v.kind, v.value)
    return report
