"""
Law Checks
Area-rate, neck-boundedness, barrier and symmetry assertions over traces
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from shapely.geometry import LineString, Point

from pancake_lab.barriers import BarrierCurve, BarrierKind, avoidance_check
from pancake_lab.curve_core import ProfileGraph, hausdorff_distance
from pancake_lab.errors import DiagnosticsError
from pancake_lab.flow_engine import FlowState, FlowTrace
from pancake_lab.stack_shooter import ShootResult
from .filters import Violation, ViolationFilter
from .series import SeriesReport

RATE_SLACK = 0.1
INSCRIBED_SCAN = 200


@dataclass
class LawCheck:
    """Pass/fail of one law with the smallest margin seen"""
    law: str
    passed: bool
    margin: float
    violations: List[Violation] = field(default_factory=list)
    details: Dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {'law': self.law, 'passed': self.passed, 'margin': self.margin,
                'violations': [v.to_dict() for v in self.violations], 'details': self.details}


def _check(law: str, margins: Sequence[Tuple[float, float]], **details) -> LawCheck:
    """margins: (t, margin) pairs, negative margin means the law failed by that much"""
    candidates = [Violation(t, law, -value) for t, value in margins if value < 0.0]
    violations = ViolationFilter.clean(candidates)
    margin = min((value for _, value in margins), default=math.inf)
    return LawCheck(law=law, passed=not violations, margin=float(margin), violations=violations,
                    details=details)


# ==================== AREA RATE ====================

def area_rate_bound(c: float, W_slab: float, n: int, pieces: int) -> float:
    """2*pi + C_{c,W} with C_{c,W} = (n - 1) W k / c for k clipped pieces"""
    return 2.0 * math.pi + (n - 1) * W_slab * pieces / c


def area_rate_check(report: SeriesReport, c: float, W_slab: float, n: int,
                    slack: float = RATE_SLACK) -> LawCheck:
    """
    |d/dt Area above c| against its bound plus relative slack.

    Raises:
        DiagnosticsError: "estimate inapplicable" when the curves leave the
            slab or a clipped arc turns by a full revolution
    """
    if c not in report.rates:
        raise DiagnosticsError(f"no area series for c={c}")
    tol = 1e-9 * max(1.0, W_slab)
    wide = [t for t, w in zip(report.times, report.width) if w > W_slab + tol]
    if wide:
        raise DiagnosticsError(f"estimate inapplicable: curve wider than the slab at t={wide[0]:.6g}")
    curled = [t for t, k in zip(report.times, report.turning[c]) if k >= 1.0]
    if curled:
        raise DiagnosticsError(f"estimate inapplicable: turning number >= 1 at t={curled[0]:.6g}")

    margins = []
    for t, rate, pieces in zip(report.times, report.rates[c], report.clipped[c]):
        if rate is None or pieces == 0:
            continue
        bound = area_rate_bound(c, W_slab, n, pieces) * (1.0 + slack)
        margins.append((t, bound - abs(rate)))
    return _check(f'area-rate:{c:g}', margins, c=c, W_slab=W_slab, n=n, slack=slack)


# ==================== NECKS ====================

def neck_boundedness_check(results: Sequence[ShootResult], band: Tuple[float, float]) -> LawCheck:
    """Every recentred neck series stays inside band; the comparison lists consecutive spans"""
    lo, hi = band
    spans, margins = [], []
    for r in results:
        span = r.neck_span()
        if span is None:
            continue
        spans.append({'s': r.s, 'min': span[0], 'max': span[1]})
        margins.append((r.s, min(span[0] - lo, hi - span[1])))
    comparison = [
        {'s_a': a['s'], 's_b': b['s'], 'min_shift': b['min'] - a['min'], 'max_shift': b['max'] - a['max']}
        for a, b in zip(spans, spans[1:])
    ]
    return _check('neck-band', margins, band=list(band), spans=spans, comparison=comparison)


# ==================== BARRIERS ====================

def csf_upper_barrier_check(forced: FlowTrace, unforced: FlowTrace, tol: Optional[float] = None) -> LawCheck:
    """The forced flow stays below plain curve shortening from the same data"""
    tol = 2.0 * forced.config.spacing if tol is None else tol
    margins = []
    for snap in forced.snapshots:
        other = unforced.at(snap.t)
        if other is None or not snap.components:
            continue
        worst = math.inf
        for comp in snap.components:
            upper = np.array([other.neck_value(x) for x in comp.nodes])
            worst = min(worst, float((upper - comp.heights).min()))
        margins.append((snap.t, worst + tol))
    return _check('csf-upper-barrier', margins, tol=tol)


def _boundary_distance(a: FlowState, b: FlowState) -> float:
    lines_b = [LineString(c.points) for c in b.components]
    return min(LineString(c.points).distance(line) for c in a.components for line in lines_b)


def flow_avoidance_check(a: FlowTrace, b: FlowTrace, slack: Optional[float] = None) -> LawCheck:
    """
    Two flows from disjoint initial curves stay apart: the distance between
    them at matched snapshot times never falls below an earlier value by
    more than slack (default 2 * spacing).

    Raises:
        DiagnosticsError: the traces use different configs, or the initial
            curves touch
    """
    if a.config != b.config:
        raise DiagnosticsError("flow avoidance needs both traces under the same config")
    start = _boundary_distance(a.snapshots[0], b.snapshots[0])
    if start <= 0.0:
        raise DiagnosticsError("initial curves are not disjoint")
    slack = 2.0 * a.config.spacing if slack is None else slack

    margins, distances = [], []
    best = start
    for snap in a.snapshots:
        other = b.at(snap.t)
        if other is None or not snap.components or not other.components:
            continue
        d = _boundary_distance(snap, other)
        distances.append(d)
        margins.append((snap.t, d - best + slack))
        best = max(best, d)
    return _check('flow-avoidance', margins, initial=start, final=distances[-1] if distances else None,
                  matched=len(distances))


def slab_containment(trace: FlowTrace, x_lo: float, x_hi: float, tol: Optional[float] = None) -> LawCheck:
    """Every snapshot stays between the static planes x = x_lo and x = x_hi"""
    tol = trace.config.spacing if tol is None else tol
    margins = []
    for snap in trace.snapshots:
        if not snap.components:
            continue
        left = snap.components[0].nodes[0] - x_lo
        right = x_hi - snap.components[-1].nodes[-1]
        margins.append((snap.t, min(left, right) + tol))
    return _check('slab-containment', margins, x_lo=x_lo, x_hi=x_hi)


def _points(state: FlowState) -> np.ndarray:
    return np.vstack([c.points for c in state.components])


def symmetry_defect(trace: FlowTrace, center: float = 0.0) -> float:
    """Largest Hausdorff distance between a snapshot and its mirror image about x = center"""
    worst = 0.0
    for snap in trace.snapshots:
        if not snap.components:
            continue
        pts = _points(snap)
        mirror = pts * np.array([-1.0, 1.0]) + np.array([2.0 * center, 0.0])
        worst = max(worst, hausdorff_distance(pts, mirror).value)
    return worst


# ==================== INSCRIBED SPHERE ====================

def inscribed_sphere_radius(curve: ProfileGraph) -> Tuple[float, float]:
    """
    Largest axis-centred ball inside the region of a closed profile.

    Returns:
        (radius, center_x)
    """
    if not curve.closed:
        raise DiagnosticsError("inscribed sphere needs a closed profile")
    line = LineString(curve.points)

    def neg_radius(x: float) -> float:
        return -line.distance(Point(x, 0.0))

    grid = np.linspace(curve.nodes[0], curve.nodes[-1], INSCRIBED_SCAN)
    values = np.array([neg_radius(x) for x in grid])
    k = int(np.argmin(values))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    best = minimize_scalar(neg_radius, bounds=(lo, hi), method='bounded', options={'xatol': 1e-10})
    if best.fun <= values[k]:
        return float(-best.fun), float(best.x)
    return float(-values[k]), float(grid[k])


def entry_time(trace: FlowTrace, R: float) -> Optional[float]:
    """First time (interpolated between snapshots) with girth <= R, None if never"""
    previous = None
    for snap in trace.snapshots:
        g = snap.girth()
        if g <= R:
            if previous is None:
                return snap.t
            t0, g0 = previous
            return t0 + (g0 - R) / (g0 - g) * (snap.t - t0)
        previous = (snap.t, g)
    return None


def existence_time_check(trace: FlowTrace, R: Optional[float] = None, slack: float = 0.05) -> LawCheck:
    """
    The flow cannot enter the cylinder of radius R before its inscribed
    sphere shrinks to R: entry - t0 >= (r0^2 - R^2)/(2n) (1 - slack).

    Raises:
        DiagnosticsError: several initial components, R outside (0, r0), or a
            trace that never enters C_R on its recorded snapshots
    """
    start = trace.snapshots[0]
    if start.count != 1:
        raise DiagnosticsError("existence-time check needs a single initial component")
    r0, center = inscribed_sphere_radius(start.components[0])
    R = 0.5 * r0 if R is None else R
    if not 0 < R < r0:
        raise DiagnosticsError(f"R={R} must lie in (0, r0={r0:.6g})")
    n = trace.config.n
    bound = (r0 * r0 - R * R) / (2.0 * n) * (1.0 - slack)
    entered = entry_time(trace, R)
    if entered is None:
        raise DiagnosticsError(f"trace never enters C_R for R={R:.6g} (stopped at t={trace.snapshots[-1].t:.6g})")
    margins = [(entered, (entered - start.t) - bound)]
    return _check('existence-time', margins, r0=r0, center=center, R=R, bound=bound, entry=entered)


def sphere_girth_check(report: SeriesReport, r0: float, n: int, slack: float) -> LawCheck:
    """girth(t)^2 >= r0^2 - 2 n (t - t0) - slack while the inscribed sphere lives"""
    t0 = report.times[0]
    margins = []
    for t, g in zip(report.times, report.girth):
        floor = r0 * r0 - 2.0 * n * (t - t0)
        if floor <= 0.0:
            break
        margins.append((t, g * g - floor + slack))
    return _check('sphere-girth', margins, r0=r0, n=n, slack=slack)


def monotone_checks(report: SeriesReport) -> List[LawCheck]:
    """Critical-point and per-barrier intersection monotonicity as checks"""
    checks = []
    laws = ['critical-points'] + [f'sturm:{name}' for name in sorted(report.sturm)]
    for law in laws:
        found = [v for v in report.violations if v.law == law]
        checks.append(LawCheck(law=law, passed=not found, margin=0.0 if not found else -max(
            v.magnitude for v in found), violations=found))
    return checks


# ==================== CATENOID CROSSINGS ====================

def catenoid_crossing_check(trace: FlowTrace, barrier: BarrierCurve) -> LawCheck:
    """
    A catenoid through the neck meets the initial profile in zero or two points,
    and the count never grows afterwards.

    Raises:
        DiagnosticsError: the barrier is not a catenoid
    """
    if barrier.kind is not BarrierKind.CATENOID:
        raise DiagnosticsError(f"{barrier.name} is not a catenoid")
    report = avoidance_check(trace, barrier, expect_disjoint=False)
    counts = report.intersection_counts
    margins = [(report.samples[0].t, 0.0 if counts[0] in (0, 2) else -1.0)]
    margins += [(s.t, float(prev - s.intersections))
                for prev, s in zip(counts, report.samples[1:])]
    return _check('catenoid-crossings', margins, initial=counts[0], counts=counts)
