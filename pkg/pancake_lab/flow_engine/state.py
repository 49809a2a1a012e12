"""
Flow State and Trace
Snapshots of an evolving family of profile components
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from pancake_lab.curve_core import ProfileGraph
from .config import FlowConfig
from .events import EventKind, EventProcessor, FlowEvent


class FlowStatus(Enum):
    RUNNING = 'running'
    PINCHED = 'pinched'
    EXTINCT = 'extinct'
    BLOWN_UP = 'blown-up'


def refined_max(component: ProfileGraph) -> float:
    """Maximum height refined by a parabola through the top node and its neighbours"""
    u = component.heights
    j = int(np.argmax(u))
    if j == 0 or j == len(u) - 1:
        return float(u[j])
    x0, x1, x2 = component.nodes[j - 1:j + 2]
    y0, y1, y2 = u[j - 1:j + 2]
    d1 = (y1 - y0) / (x1 - x0)
    d2 = (y2 - y1) / (x2 - x1)
    a = (d2 - d1) / (x2 - x0)
    if a >= 0.0:
        return float(y1)
    xv = 0.5 * (x0 + x1) - d1 / (2.0 * a)
    return float(max(y1, y0 + d1 * (xv - x0) + a * (xv - x0) * (xv - x1)))


@dataclass(frozen=True)
class FlowState:
    """Time, components ordered along the axis, and status"""
    t: float
    components: Tuple[ProfileGraph, ...]
    status: FlowStatus = FlowStatus.RUNNING

    def __post_init__(self):
        ordered = tuple(sorted(self.components, key=lambda c: c.nodes[0]))
        object.__setattr__(self, 'components', ordered)

    @property
    def count(self) -> int:
        return len(self.components)

    def with_status(self, status: FlowStatus) -> "FlowState":
        return replace(self, status=status)

    def shifted(self, offset: float) -> "FlowState":
        return replace(self, t=self.t - offset)

    def girth(self) -> float:
        """Raw node maximum over all components"""
        if not self.components:
            return 0.0
        return max(c.max_height() for c in self.components)

    def max_height(self) -> float:
        """M(t): parabola-refined maximum over all components"""
        if not self.components:
            return 0.0
        return max(refined_max(c) for c in self.components)

    def neck_value(self, x0: float = 0.0) -> float:
        """m(t): height at x0 of the component covering it, 0 when none does"""
        for comp in self.components:
            if comp.nodes[0] <= x0 <= comp.nodes[-1]:
                return comp.height_at(x0)
        return 0.0

    def width(self) -> float:
        """Axial extent of the union of components"""
        if not self.components:
            return 0.0
        return float(self.components[-1].nodes[-1] - self.components[0].nodes[0])

    def pairwise_disjoint(self) -> bool:
        comps = self.components
        return all(a.nodes[-1] < b.nodes[0] for a, b in zip(comps, comps[1:]))


@dataclass
class FlowTrace:
    """
    Record of one evolution: snapshots, events and extinction time.

    Times are absolute unless the trace has been recentred with shifted().
    """
    config: FlowConfig
    initial: FlowState
    snapshots: List[FlowState] = field(default_factory=list)
    events: List[FlowEvent] = field(default_factory=list)
    extinction_time: Optional[float] = None
    final: Optional[FlowState] = None
    pre_stop: Optional[FlowState] = None
    stop_reason: str = ''
    offset: float = 0.0

    def record(self, state: FlowState) -> None:
        if self.snapshots and abs(self.snapshots[-1].t - state.t) <= 1e-12 * max(1.0, abs(state.t)):
            self.snapshots[-1] = state
        else:
            self.snapshots.append(state)

    def log(self, event: FlowEvent) -> None:
        self.events.append(event)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    def at(self, t: float, tol: float = 1e-9) -> Optional[FlowState]:
        """Snapshot recorded at time t, or None"""
        for snap in self.snapshots:
            if abs(snap.t - t) <= tol * max(1.0, abs(t)):
                return snap
        return None

    def first(self, kind: EventKind) -> Optional[FlowEvent]:
        return EventProcessor.first(self.events, kind)

    def topology_events(self) -> List[FlowEvent]:
        return [e for e in self.events if EventProcessor.changes_topology(e)]

    def shifted(self, offset: float) -> "FlowTrace":
        """Copy with every time reduced by offset (t -> t - offset)"""
        return FlowTrace(
            config=self.config,
            initial=self.initial.shifted(offset),
            snapshots=[s.shifted(offset) for s in self.snapshots],
            events=[replace(e, t=e.t - offset) for e in self.events],
            extinction_time=None if self.extinction_time is None else self.extinction_time - offset,
            final=None if self.final is None else self.final.shifted(offset),
            pre_stop=None if self.pre_stop is None else self.pre_stop.shifted(offset),
            stop_reason=self.stop_reason,
            offset=self.offset + offset,
        )

    def log_lines(self) -> List[str]:
        return [e.line() for e in self.events]
