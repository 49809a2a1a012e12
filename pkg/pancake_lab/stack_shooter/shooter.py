"""
Stack Shooter
Classify glued flows by component count, bisect to the critical neck, and
build the recentred old flow just above it
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from pancake_lab.config import RunConfig, thread_count
from pancake_lab.curve_core import count_critical_points
from pancake_lab.errors import FlowError, ShootError
from pancake_lab.flow_engine import EventKind, FlowEngine, FlowState, FlowTrace
from pancake_lab.pancake_model import JoinedProfile, NeckJoinSpec, join
from .results import Classification, Label, ShootResult, monotonicity_anomalies

logger = logging.getLogger("pancake_lab.stack_shooter")


class MaxHeightBelow:
    """Stop once M(t) reaches the threshold, or at the first split when asked"""

    def __init__(self, threshold: float, stop_on_pinch: bool = True):
        self.threshold = threshold
        self.stop_on_pinch = stop_on_pinch

    def __call__(self, state: FlowState) -> bool:
        if self.stop_on_pinch and state.count > 1:
            return True
        return state.max_height() <= self.threshold


def threshold_time(trace: FlowTrace, threshold: float) -> float:
    """Linear interpolation of the crossing M = threshold between the last two states"""
    final, before = trace.final, trace.pre_stop
    if before is None:
        return final.t
    M0, M1 = before.max_height(), final.max_height()
    if M0 <= M1:
        return final.t
    frac = (M0 - threshold) / (M0 - M1)
    return before.t + min(max(frac, 0.0), 1.0) * (final.t - before.t)


class StackShooter:
    """
    Runs the one-parameter shooting in m for each construction time.

    All work for one construction time is sequential; different times are
    independent and fan out in run_schedule.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.engine = FlowEngine(config.flow)

    # ==================== INITIAL DATA ====================

    def joined_profile(self, s: float, m: Optional[float] = None, rho: Optional[float] = None) -> JoinedProfile:
        cfg = self.config
        spec = NeckJoinSpec(
            pancake=cfg.pancake_spec(s), m=m, rho=rho, gap_half=cfg.pancake.gap_half,
            spacing=cfg.flow.spacing, check_monotone=cfg.pancake.check_monotone,
        )
        return join(spec)

    def tolerance(self, s: float) -> float:
        return self.config.shoot.tol_fraction * self.config.pancake_spec(s).girth_g

    # ==================== CLASSIFY ====================

    def classify(self, m: float, s: float, threshold: Optional[float] = None) -> Classification:
        """
        Evolve join(s, m) until M first drops to the threshold and count components.

        Raises:
            ShootError: threshold not below the initial maximum height
        """
        threshold = self.config.threshold() if threshold is None else threshold
        joined = self.joined_profile(s, m=m)
        if joined.curve.max_height() <= threshold:
            raise ShootError(f"threshold {threshold:.6g} not below the initial girth "
                             f"{joined.curve.max_height():.6g}")

        stop = MaxHeightBelow(threshold, self.config.shoot.stop_on_pinch)
        try:
            trace = self.engine.evolve(joined, stop=stop)
        except FlowError as exc:
            logger.warning("classify m=%.9g s=%g undetermined: %s", m, s, exc)
            return Classification(m, Label.UNDETERMINED, reason=str(exc), trace=exc.trace)

        pinched = trace.first(EventKind.PINCH) is not None
        reached = trace.stop_reason == 'stop' and trace.final.max_height() <= threshold
        T_m = threshold_time(trace, threshold) if reached else None

        if pinched or trace.final.count > 1:
            label = Label.TWO
        elif reached:
            label = Label.ONE
        else:
            label = Label.UNDETERMINED
        result = Classification(m, label, T_m=T_m, reason=trace.stop_reason, trace=trace)
        logger.info("classify s=%g m=%.9g -> %s (T_m=%s)", s, m, label.value, T_m)
        return result

    # ==================== BISECT ====================

    def bisect(self, s: float, m_lo: Optional[float] = None, m_hi: Optional[float] = None,
               tol_m: Optional[float] = None) -> ShootResult:
        """
        Bisect the neck parameter between a two-component and a one-component flow.

        Raises:
            ShootError: invalid initial bracket, an undetermined sample or the iteration cap
        """
        shoot = self.config.shoot
        girth = self.config.pancake_spec(s).girth_g
        m_lo = shoot.m_lo_fraction * girth if m_lo is None else m_lo
        m_hi = shoot.m_hi_fraction * girth if m_hi is None else m_hi
        tol_m = self.tolerance(s) if tol_m is None else tol_m
        if not 0.0 < m_lo < m_hi:
            raise ShootError(f"invalid bracket ({m_lo}, {m_hi})")
        threshold = self.config.threshold()
        result = ShootResult(s=s, threshold=threshold, tol_m=tol_m)

        low = self.classify(m_lo, s, threshold)
        high = self.classify(m_hi, s, threshold)
        result.samples.extend([low, high])
        if low.label is not Label.TWO or high.label is not Label.ONE:
            raise ShootError(
                f"invalid bracket: m_lo={m_lo:.6g} is {low.label.value}, m_hi={m_hi:.6g} is {high.label.value}",
                witnesses=(low, high), samples=result.samples,
            )

        for m in np.linspace(m_lo, m_hi, shoot.probes + 2)[1:-1]:
            self._determined(self.classify(float(m), s, threshold), result)

        lo, hi = m_lo, m_hi
        while hi - lo >= tol_m:
            if result.iterations >= shoot.max_iterations:
                raise ShootError(f"bisection exceeded {shoot.max_iterations} iterations",
                                 witnesses=(lo, hi), samples=result.samples)
            mid = 0.5 * (lo + hi)
            sample = self._determined(self.classify(mid, s, threshold), result)
            result.iterations += 1
            if sample.label is Label.ONE:
                hi = mid
            else:
                lo = mid

        result.bracket = (lo, hi)
        result.anomalies = monotonicity_anomalies(result.samples)
        if result.anomalies:
            logger.warning("s=%g: classification not monotone in m at %s; run marked suspect",
                           s, result.anomalies)
        logger.info("s=%g: m* = %.9g +- %.3g after %d iterations", s, result.m_star,
                    0.5 * result.width, result.iterations)
        return result

    @staticmethod
    def _determined(sample: Classification, result: ShootResult) -> Classification:
        """Record a sample; undetermined ones abort the bisection"""
        result.samples.append(sample)
        if sample.label is Label.UNDETERMINED:
            raise ShootError(f"undetermined classification at m={sample.m:.9g}: {sample.reason}",
                             witnesses=(sample,), samples=result.samples)
        return sample

    # ==================== OLD FLOW ====================

    def _snapshot_times(self, T: float) -> List[float]:
        stride = self.config.flow.snapshot_stride
        count = int(math.floor(T / stride + 1e-9))
        return [T - k * stride for k in range(count, -1, -1) if T - k * stride > 0.0]

    def build_old_flow(self, i: int, schedule: Optional[Sequence[float]] = None,
                       delta: Optional[float] = None, result: Optional[ShootResult] = None) -> ShootResult:
        """
        Flow from join(s_i, m* + delta) recentred so that T_{m_bar} is t = 0.

        Raises:
            ShootError: t = 0 slice disconnected or convex (margin too small/large)
        """
        schedule = list(self.config.shoot.schedule if schedule is None else schedule)
        s = schedule[i]
        shot = result if result is not None else self.bisect(s)
        delta = self.config.shoot.delta_factor * shot.tol_m if delta is None else delta
        m_bar = shot.m_star + delta

        first = self.classify(m_bar, s, shot.threshold)
        below = next((c for c in reversed(shot.sorted_samples()) if c.label is Label.TWO), None)
        if first.label is not Label.ONE or first.T_m is None:
            raise ShootError(f"margin delta too small: m_bar={m_bar:.9g} is {first.label.value}",
                             witnesses=(first, below), samples=shot.samples)

        T = first.T_m
        joined = self.joined_profile(s, m=m_bar)
        trace = self.engine.evolve(joined, max_time=T, snapshot_times=self._snapshot_times(T))
        recentered = trace.shifted(T)
        zero = recentered.final

        if zero.count != 1 or trace.topology_events():
            raise ShootError("margin delta too small: t = 0 slice disconnected",
                             witnesses=(zero, below), samples=shot.samples)
        crit = count_critical_points(zero.components[0])
        if (crit.maxima, crit.minima) != (2, 1):
            raise ShootError(
                f"margin delta too large: t = 0 slice has {crit.maxima} maxima, {crit.minima} minima",
                witnesses=(zero, first), samples=shot.samples,
            )

        shot.m_bar = m_bar
        shot.T = T
        shot.neck_at_zero = zero.neck_value()
        shot.recentered_trace = recentered
        lo, hi = self.config.band()
        if not lo <= shot.neck_at_zero <= hi:
            shot.notes.append(f"neck {shot.neck_at_zero:.6g} at t=0 outside band ({lo:.6g}, {hi:.6g})")
            logger.warning("s=%g: %s; run marked suspect", s, shot.notes[-1])
        logger.info("s=%g: old flow built, m_bar=%.9g T=%.6g", s, m_bar, T)
        return shot

    def run_schedule(self, schedule: Optional[Sequence[float]] = None,
                     threads: Optional[int] = None) -> List[ShootResult]:
        """Build every old flow of the schedule; results in schedule order"""
        schedule = list(self.config.shoot.schedule if schedule is None else schedule)
        threads = thread_count() if threads is None else max(threads, 1)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(self.build_old_flow, i, schedule) for i in range(len(schedule))]
            results = [f.result() for f in futures]

        for prev, cur in zip(results, results[1:]):
            if cur.T <= prev.T:
                cur.notes.append(f"lifespan T={cur.T:.6g} not above T={prev.T:.6g} of s={prev.s:g}")
                logger.warning("s=%g: %s; run marked suspect", cur.s, cur.notes[-1])
        return results


def classify(m: float, s: float, M_threshold: Optional[float], config: RunConfig) -> Classification:
    return StackShooter(config).classify(m, s, M_threshold)


def bisect(s: float, m_lo: float, m_hi: float, tol_m: float, config: RunConfig) -> ShootResult:
    return StackShooter(config).bisect(s, m_lo, m_hi, tol_m)


def build_old_flow(i: int, schedule: Sequence[float], delta: Optional[float], config: RunConfig,
                   result: Optional[ShootResult] = None) -> ShootResult:
    return StackShooter(config).build_old_flow(i, schedule, delta, result)


def run_schedule(config: RunConfig, schedule: Optional[Sequence[float]] = None,
                 threads: Optional[int] = None) -> List[ShootResult]:
    return StackShooter(config).run_schedule(schedule, threads)
