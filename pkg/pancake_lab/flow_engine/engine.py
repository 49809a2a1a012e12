"""
Flow Engine
Coordinates time stepping, resampling, surgery and snapshot recording
"""
import logging
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from pancake_lab.curve_core import ProfileGraph, resample
from pancake_lab.errors import CurveError, FlowError
from .config import FlowConfig
from .events import EventKind, FlowEvent
from .kinematics import node_velocities, stable_time_step
from .state import FlowState, FlowStatus, FlowTrace
from .surgery import effective_spacing, needs_resample, neck_index, split_all, vanishing

logger = logging.getLogger("pancake_lab.flow_engine")

StopPredicate = Callable[[FlowState], bool]
Initial = Union[ProfileGraph, FlowState, Sequence[ProfileGraph], object]

DT_FLOOR = 1e-14


class FlowEngine:
    """
    Explicit midpoint integrator for the forced curve-shortening flow of
    profile components, with neck surgery and cap extinction.
    """

    def __init__(self, config: FlowConfig):
        self.config = config

    # ==================== SINGLE STEP ====================

    def time_step(self, state: FlowState) -> float:
        cfg = self.config
        return stable_time_step(state.components, cfg.n, cfg.cfl, cfg.forcing)

    def _rates(self, comps: List[np.ndarray], ends: List[Tuple[bool, bool]]) -> List[np.ndarray]:
        cfg = self.config
        return [node_velocities(p, e, cfg.n, cfg.forcing) for p, e in zip(comps, ends)]

    def _advance(self, state: FlowState, dt: float) -> FlowState:
        ends = [c.closed_ends for c in state.components]
        start = [c.points for c in state.components]
        k1 = self._rates(start, ends)
        half = [p + 0.5 * dt * v for p, v in zip(start, k1)]
        k2 = self._rates(half, ends)

        moved = []
        for p, v, e in zip(start, k2, ends):
            new = p + dt * v
            if e[0]:
                new[0, 1] = 0.0
            if e[1]:
                new[-1, 1] = 0.0
            bad = self._first_defect(new)
            if bad is not None:
                raise FlowError("profile left the graphical class", state=state,
                                node=(float(new[bad, 0]), float(new[bad, 1])))
            moved.append(ProfileGraph(new[:, 0], new[:, 1], e))
        return FlowState(state.t + dt, tuple(moved), FlowStatus.RUNNING)

    @staticmethod
    def _first_defect(points: np.ndarray) -> Optional[int]:
        if not np.all(np.isfinite(points)):
            return int(np.flatnonzero(~np.isfinite(points).all(axis=1))[0])
        order = np.flatnonzero(np.diff(points[:, 0]) <= 0.0)
        if len(order):
            return int(order[0] + 1)
        low = np.flatnonzero(points[1:-1, 1] <= 0.0)
        if len(low):
            return int(low[0] + 1)
        return None

    def _tidy(self, state: FlowState) -> Tuple[FlowState, List[FlowEvent]]:
        """Remove vanishing components, resample, flag necks"""
        cfg = self.config
        events = []
        kept = []
        for comp in state.components:
            if vanishing(comp, cfg.tip_eps):
                x_mid = float(0.5 * (comp.nodes[0] + comp.nodes[-1]))
                events.append(FlowEvent(state.t, EventKind.CAP_EXTINCT, x_mid, 0.0))
                events.append(FlowEvent(state.t, EventKind.COMPONENT_EXTINCT, x_mid, 0.0))
                logger.info("component extinct at t=%.6g x=%.6g", state.t, x_mid)
                continue
            if needs_resample(comp, cfg.spacing):
                comp = resample(comp, effective_spacing(comp, cfg.spacing))
            kept.append(comp)

        if not kept:
            return FlowState(state.t, (), FlowStatus.EXTINCT), events
        status = FlowStatus.RUNNING
        if any(neck_index(c, cfg.pinch_eps) is not None for c in kept):
            status = FlowStatus.PINCHED
        return FlowState(state.t, tuple(kept), status), events

    def _step(self, state: FlowState, dt: Optional[float] = None) -> Tuple[FlowState, List[FlowEvent]]:
        if state.status is not FlowStatus.RUNNING:
            raise FlowError(f"cannot step a {state.status.value} state", state=state)
        if dt is None:
            dt = self.time_step(state)
        if dt < DT_FLOOR:
            raise FlowError(f"time step underflow (dt={dt:.3g})", state=state)
        try:
            moved = self._advance(state, dt)
            return self._tidy(moved)
        except CurveError as exc:
            raise FlowError(f"invalid profile after step: {exc}", state=state) from exc

    def step(self, state: FlowState) -> FlowState:
        """One midpoint step; status becomes pinched/extinct when an event is due"""
        return self._step(state)[0]

    def _handle_pinch(self, state: FlowState) -> Tuple[FlowState, List[FlowEvent]]:
        cfg = self.config
        comps, pinches = split_all(list(state.components), cfg.pinch_eps, cfg.spacing)
        if not pinches:
            raise FlowError("no neck below pinch_eps", state=state)
        events = []
        for x, r in pinches:
            logger.info("pinch at t=%.6g x=%.6g r=%.6g", state.t, x, r)
            events.append(FlowEvent(state.t, EventKind.PINCH, x, r))
            events.append(FlowEvent(state.t, EventKind.SPLIT, x, 0.0))
        return FlowState(state.t, tuple(comps), FlowStatus.RUNNING), events

    def handle_pinch(self, state: FlowState) -> FlowState:
        """Split every component at its sub-threshold neck"""
        return self._handle_pinch(state)[0]

    # ==================== EVOLUTION ====================

    @staticmethod
    def initial_state(initial: Initial, t0: float = 0.0) -> FlowState:
        if isinstance(initial, FlowState):
            return initial
        if isinstance(initial, ProfileGraph):
            return FlowState(t0, (initial,))
        curve = getattr(initial, 'curve', None)
        if isinstance(curve, ProfileGraph):
            return FlowState(t0, (curve,))
        comps = tuple(initial)
        if not all(isinstance(c, ProfileGraph) for c in comps):
            raise FlowError("initial data must be profile graphs")
        return FlowState(t0, comps)

    def _snapshot_schedule(self, t0: float, horizon: float,
                           snapshot_times: Optional[Sequence[float]]) -> List[float]:
        if snapshot_times is not None:
            return sorted(t for t in snapshot_times if t0 < t <= horizon)
        stride = self.config.snapshot_stride
        count = int(np.floor((horizon - t0) / stride + 1e-9))
        return [t0 + k * stride for k in range(1, count + 1)]

    def evolve(self, initial: Initial, stop: Optional[StopPredicate] = None,
               max_time: Optional[float] = None,
               snapshot_times: Optional[Sequence[float]] = None) -> FlowTrace:
        """
        Run until stop(state), extinction, or the time horizon.

        Args:
            initial: profile, joined profile, components or a state
            stop: predicate checked after every step
            max_time: duration overriding config.max_time
            snapshot_times: absolute times to record instead of the stride grid

        Raises:
            FlowError: blow-up; `trace` holds the partial record
        """
        state = self.initial_state(initial)
        trace = FlowTrace(config=self.config, initial=state)
        trace.record(state)
        horizon = state.t + (self.config.max_time if max_time is None else max_time)
        schedule = self._snapshot_schedule(state.t, horizon, snapshot_times)
        next_snap = 0
        previous = None

        while True:
            if stop is not None and stop(state):
                trace.stop_reason = 'stop'
                trace.log(FlowEvent(state.t, EventKind.THRESHOLD, 0.0, state.max_height()))
                break
            if state.t >= horizon - 1e-12 * max(1.0, abs(horizon)):
                trace.stop_reason = 'max-time'
                break

            # requested times closer than DT_FLOOR merge into the current slice
            while next_snap < len(schedule) and schedule[next_snap] - state.t < DT_FLOOR:
                next_snap += 1
            dt = self.time_step(state)
            target = schedule[next_snap] if next_snap < len(schedule) else horizon
            snap_due = False
            if state.t + dt >= target - DT_FLOOR:
                dt = target - state.t
                snap_due = next_snap < len(schedule)

            try:
                new, events = self._step(state, dt)
                if new.status is FlowStatus.PINCHED:
                    new, split_events = self._handle_pinch(new)
                    events.extend(split_events)
            except FlowError as exc:
                trace.log(FlowEvent(state.t, EventKind.ERROR, *(exc.node or (0.0, 0.0)), detail=str(exc)))
                trace.final = state.with_status(FlowStatus.BLOWN_UP)
                trace.stop_reason = 'blown-up'
                trace.record(trace.final)
                exc.trace = trace
                logger.warning("evolution blew up at t=%.6g: %s", state.t, exc)
                raise

            if snap_due:
                new = FlowState(target, new.components, new.status)
                next_snap += 1
            previous, state = state, new
            for event in events:
                trace.log(event)

            if snap_due or events:
                self._check_disjoint(state, trace)
                trace.record(state)

            if state.status is FlowStatus.EXTINCT:
                trace.extinction_time = state.t
                trace.stop_reason = 'extinct'
                break

        trace.record(state)
        trace.final = state
        trace.pre_stop = previous
        return trace

    @staticmethod
    def _check_disjoint(state: FlowState, trace: FlowTrace) -> None:
        if not state.pairwise_disjoint():
            exc = FlowError("components overlap", state=state)
            trace.log(FlowEvent(state.t, EventKind.ERROR, detail=str(exc)))
            exc.trace = trace
            raise exc


def step(state: FlowState, config: FlowConfig) -> FlowState:
    return FlowEngine(config).step(state)


def handle_pinch(state: FlowState, config: FlowConfig) -> FlowState:
    return FlowEngine(config).handle_pinch(state)


def evolve(initial: Initial, config: FlowConfig, stop: Optional[StopPredicate] = None,
           **kwargs) -> FlowTrace:
    """Evolve `initial` under `config` (see FlowEngine.evolve)"""
    return FlowEngine(config).evolve(initial, stop=stop, **kwargs)
