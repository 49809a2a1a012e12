"""
Kinematics
Normal speeds of the forced curve-shortening flow on polyline profiles
"""
from typing import Iterable, Tuple

import numpy as np

from pancake_lab.curve_core import ProfileGraph, graph_second_derivative, menger_curvature
from pancake_lab.errors import CurveError


def padded(points: np.ndarray, closed_ends: Tuple[bool, bool]) -> np.ndarray:
    """
    Add one ghost node per end.

    Capped ends reflect through the axis (r -> -r); open ends reflect across
    the vertical line through the end node.
    """
    first, second = points[0], points[1]
    last, before = points[-1], points[-2]
    if closed_ends[0]:
        left = (second[0], -second[1])
    else:
        left = (2.0 * first[0] - second[0], second[1])
    if closed_ends[1]:
        right = (before[0], -before[1])
    else:
        right = (2.0 * last[0] - before[0], before[1])
    return np.vstack((left, points, right))


def frame(points: np.ndarray, closed_ends: Tuple[bool, bool]):
    """Curvature and outward unit normals at every node"""
    ext = padded(points, closed_ends)
    prev, cur, nxt = ext[:-2], ext[1:-1], ext[2:]
    kappa = menger_curvature(prev, cur, nxt)
    tangent = nxt - prev
    tangent /= np.hypot(tangent[:, 0], tangent[:, 1])[:, None]
    normal = np.column_stack((-tangent[:, 1], tangent[:, 0]))
    return kappa, normal


def normal_speeds(points: np.ndarray, closed_ends: Tuple[bool, bool],
                  n: int, forcing: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """
    Inward normal speed V = kappa + (n - 1) cos(theta)/r at every node.

    Axis tips use the smooth-cap limit n * kappa_tip.

    Returns:
        (speeds, outward normals)
    """
    kappa, normal = frame(points, closed_ends)
    speed = kappa.copy()
    if forcing:
        r = points[:, 1]
        off_axis = r > 0.0
        speed[off_axis] += (n - 1) * normal[off_axis, 1] / r[off_axis]
        for end, idx in ((0, 0), (1, -1)):
            if closed_ends[end]:
                speed[idx] = n * kappa[idx]
    return speed, normal


def node_velocities(points: np.ndarray, closed_ends: Tuple[bool, bool],
                    n: int, forcing: bool = True) -> np.ndarray:
    """Velocity vectors -V * nu; tips slide along the axis, open ends move vertically"""
    speed, normal = normal_speeds(points, closed_ends, n, forcing)
    vel = -speed[:, None] * normal
    if closed_ends[0]:
        vel[0, 1] = 0.0
    else:
        vel[0, 0] = 0.0
    if closed_ends[1]:
        vel[-1, 1] = 0.0
    else:
        vel[-1, 0] = 0.0
    return vel


def velocity(component: ProfileGraph, index: int, n: int, forcing: bool = True) -> float:
    """
    Inward normal speed at one node of a component.

    Args:
        component: profile graph
        index: interior node with u > 0, or an axis endpoint
        n: dimension
    """
    if index < 0:
        index += component.size
    if not 0 <= index < component.size:
        raise CurveError(f"node index {index} out of range")
    on_axis = component.heights[index] == 0.0
    interior = 0 < index < component.size - 1
    if interior and on_axis:
        raise CurveError("interior node on the axis")
    if not interior and not on_axis and not _is_open_end(component, index):
        raise CurveError("endpoint must sit on the axis")
    speeds, _ = normal_speeds(component.points, component.closed_ends, n, forcing)
    return float(speeds[index])


def _is_open_end(component: ProfileGraph, index: int) -> bool:
    return (index == 0 and not component.closed_ends[0]) or \
        (index == component.size - 1 and not component.closed_ends[1])


def graph_rate(component: ProfileGraph, index: int, n: int, forcing: bool = True) -> float:
    """u_t = u_xx/(1 + u_x^2) - (n - 1)/u at an interior node"""
    u = component.heights[index]
    if u <= 0.0:
        raise CurveError("interior height must be positive")
    rate = graph_second_derivative(component, index)
    if forcing:
        rate -= (n - 1) / u
    return rate


def stable_time_step(components: Iterable[ProfileGraph], n: int, cfl: float,
                     forcing: bool = True) -> float:
    """
    cfl * min(h^2 / (2 n_tip), r_min * h / (n - 1)).

    h is the smallest node spacing and r_min the smallest off-axis height;
    the tip rows of the discrete operator carry n times the plain
    curve-shortening stiffness, hence n_tip.
    """
    h = np.inf
    r_min = np.inf
    for comp in components:
        h = min(h, float(comp.spacings().min()))
        r = comp.heights[comp.heights > 0.0]
        if len(r):
            r_min = min(r_min, float(r.min()))
    if not np.isfinite(h):
        return np.inf
    tip_weight = n if forcing else 1
    dt = h * h / (2.0 * tip_weight)
    if forcing and np.isfinite(r_min):
        dt = min(dt, r_min * h / max(n - 1, 1))
    return cfl * dt
