"""
Torus Shrinker
Closed self-shrinking profile found by symmetric shooting
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from pancake_lab.curve_core import ParamCurve
from pancake_lab.errors import BarrierError
from .barrier import BarrierCurve, BarrierKind

logger = logging.getLogger("pancake_lab.barriers")

SCAN_RANGE = (0.5, 4.0)
SCAN_STEP = 0.05
SCAN_RTOL = 1e-8
ROOT_RTOL = 1e-10
PROFILE_RTOL = 1e-12
PROFILE_ATOL = 1e-13
CLOSURE_TOL = 1e-8
MAX_ARCLENGTH = 60.0
AXIS_GUARD = 1e-3
TORUS_NODES = 10000


@dataclass(frozen=True)
class TorusProfile:
    """Shooting result: the closed profile and its quality numbers"""
    n: int
    r0: float
    curve: ParamCurve
    closure_residual: float
    shrinker_residual: float


def _rhs(s, y, n):
    x, r, theta = y
    c, sn = math.cos(theta), math.sin(theta)
    return [c, sn, 0.5 * x * sn + ((n - 1) / r - 0.5 * r) * c]


def _returns(s, y, n):
    return y[0]


_returns.terminal = True
_returns.direction = -1


def _hits_axis(s, y, n):
    return y[1] - AXIS_GUARD


_hits_axis.terminal = True
_hits_axis.direction = -1


def _shoot(r0: float, n: int, rtol: float, atol: float, dense: bool = False):
    """Launch horizontally from (0, r0); None if the curve never comes back to x = 0"""
    sol = solve_ivp(_rhs, (0.0, MAX_ARCLENGTH), [0.0, r0, 0.0], method='RK45', args=(n,),
                    events=(_returns, _hits_axis), rtol=rtol, atol=atol, dense_output=dense)
    if sol.status != 1 or len(sol.t_events[0]) == 0:
        return None
    return sol


def _miss(r0: float, n: int, rtol: float) -> float:
    sol = _shoot(r0, n, rtol, rtol * 1e-2)
    if sol is None:
        return math.nan
    theta_end = sol.y_events[0][0][2]
    return math.sin(theta_end)


def _bracket(n: int) -> Tuple[float, float]:
    lo, hi = SCAN_RANGE
    grid = np.arange(lo, hi + 0.5 * SCAN_STEP, SCAN_STEP)
    values: List[float] = [_miss(float(r), n, SCAN_RTOL) for r in grid]
    for (a, fa), (b, fb) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if math.isfinite(fa) and math.isfinite(fb) and fa * fb < 0.0:
            return float(a), float(b)
    raise BarrierError(f"torus shooting failed to bracket on r0 in [{lo}, {hi}]")


def _derivatives(values: np.ndarray, ds: float) -> Tuple[np.ndarray, np.ndarray]:
    """Periodic fourth-order first and second differences"""
    p2, p1 = np.roll(values, -2, axis=0), np.roll(values, -1, axis=0)
    m1, m2 = np.roll(values, 1, axis=0), np.roll(values, 2, axis=0)
    first = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * ds)
    second = (-p2 + 16.0 * p1 - 30.0 * values + 16.0 * m1 - m2) / (12.0 * ds * ds)
    return first, second


def _frame(curve: ParamCurve):
    ds = curve.length() / curve.size
    d1, d2 = _derivatives(curve.points, ds)
    speed = np.hypot(d1[:, 0], d1[:, 1])
    normal = np.column_stack((-d1[:, 1], d1[:, 0])) / speed[:, None]
    kappa = -(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed ** 3
    return kappa, normal


def mean_curvature(curve: ParamCurve, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """kappa + (n - 1) nu_r / r on a closed curve sampled uniformly in arclength"""
    kappa, normal = _frame(curve)
    return kappa + (n - 1) * normal[:, 1] / curve.r, normal


def shrinker_residual(curve: ParamCurve, n: int) -> float:
    """Sup-norm of H - <p, nu>/2"""
    H, normal = mean_curvature(curve, n)
    support = np.einsum('ij,ij->i', curve.points, normal)
    return float(np.abs(H - 0.5 * support).max())


def slice_speed_defect(curve: ParamCurve, n: int, t: float) -> float:
    """
    Sup |V - H| on the slice sqrt(-t) * curve, with V the normal velocity of
    the homothetic motion.
    """
    if t >= 0:
        raise BarrierError("shrinker slices exist for t < 0 only")
    slice_t = curve.scaled(math.sqrt(-t))
    H, normal = mean_curvature(slice_t, n)
    velocity = slice_t.points / (2.0 * t)
    V = -np.einsum('ij,ij->i', velocity, normal)
    return float(np.abs(V - H).max())


def torus_shrinker_profile(n: int, nodes: int = TORUS_NODES) -> TorusProfile:
    """
    Closed reflection-symmetric shrinker profile.

    Raises:
        BarrierError: no sign change of the return angle on the scan range,
            or the refined profile fails to close
    """
    if n < 2:
        raise BarrierError("torus shrinker needs n >= 2")
    a, b = _bracket(n)
    r0 = brentq(lambda r: _miss(r, n, ROOT_RTOL), a, b, rtol=ROOT_RTOL, xtol=1e-13)

    sol = _shoot(r0, n, PROFILE_RTOL, PROFILE_ATOL, dense=True)
    if sol is None:
        raise BarrierError(f"refined torus shot from r0={r0:.12g} did not return")
    s_end = float(sol.t_events[0][0])
    x_end, _, theta_end = sol.y_events[0][0]
    closure = max(abs(x_end), abs(math.sin(theta_end)))
    if closure > CLOSURE_TOL:
        raise BarrierError(f"torus profile fails to close (residual {closure:.3g})")

    half = max(nodes // 2, 8)
    s = np.linspace(0.0, s_end, half + 1)
    arc = sol.sol(s)[:2].T
    arc[0, 0] = arc[-1, 0] = 0.0
    mirror = arc[half - 1:0:-1] * np.array([-1.0, 1.0])
    curve = ParamCurve(np.vstack((arc, mirror)), closed=True)

    residual = shrinker_residual(curve, n)
    logger.info("torus shrinker n=%d r0=%.12g closure=%.3g residual=%.3g", n, r0, closure, residual)
    return TorusProfile(n=n, r0=r0, curve=curve, closure_residual=closure, shrinker_residual=residual)


def torus_barrier(n: int, nodes: int = TORUS_NODES,
                  profile: Optional[TorusProfile] = None) -> BarrierCurve:
    """Shrinking torus sqrt(-t) * profile, alive for t < 0"""
    profile = profile or torus_shrinker_profile(n, nodes)
    return BarrierCurve(
        kind=BarrierKind.TORUS_SHRINKER,
        params={'n': n, 'r0': profile.r0},
        generator=lambda t: profile.curve.scaled(math.sqrt(-t)),
        lifespan=(-math.inf, 0.0),
    )
