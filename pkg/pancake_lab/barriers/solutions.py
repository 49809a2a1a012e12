"""
Exact and Approximate Solutions
Shrinking spheres and cylinders, catenoids, rotated grim reapers and slabs
"""
import math
from typing import Callable

import numpy as np
from scipy.integrate import quad

from pancake_lab.curve_core import ParamCurve, ProfileGraph
from pancake_lab.errors import BarrierError
from .barrier import BarrierCurve, BarrierKind

CATENOID_NODES = 4001


# ==================== SHRINKING SPHERE / CYLINDER ====================

def shrinking_sphere(R0: float, n: int) -> Callable[[float], float]:
    """R(t) = sqrt(R0^2 - 2 n t), defined up to extinction at R0^2/(2n)"""
    if R0 <= 0 or n < 1:
        raise BarrierError("sphere needs R0 > 0 and n >= 1")
    extinction = R0 * R0 / (2.0 * n)

    def radius(t: float) -> float:
        if t > extinction:
            raise BarrierError(f"t={t} beyond extinction at {extinction}")
        return math.sqrt(max(R0 * R0 - 2.0 * n * t, 0.0))

    radius.extinction = extinction
    return radius


def shrinking_cylinder(u0: float, n: int) -> Callable[[float], float]:
    """u(t) = sqrt(u0^2 - 2 (n - 1) t)"""
    if u0 <= 0 or n < 2:
        raise BarrierError("cylinder needs u0 > 0 and n >= 2")
    extinction = u0 * u0 / (2.0 * (n - 1))

    def radius(t: float) -> float:
        if t > extinction:
            raise BarrierError(f"t={t} beyond extinction at {extinction}")
        return math.sqrt(max(u0 * u0 - 2.0 * (n - 1) * t, 0.0))

    radius.extinction = extinction
    return radius


def round_profile(center_x: float, radius: float, spacing: float) -> ProfileGraph:
    """Semicircle of the given radius centred on the axis"""
    count = max(int(math.ceil(math.pi * radius / spacing)) + 1, 9)
    phi = np.linspace(0.0, math.pi, count)
    x = center_x - radius * np.cos(phi)
    r = radius * np.sin(phi)
    r[0] = r[-1] = 0.0
    return ProfileGraph(x, r, (True, True))


def sphere_barrier(R0: float, n: int, center_x: float = 0.0, spacing: float = 0.05,
                   t0: float = 0.0) -> BarrierCurve:
    """Sphere of radius R0 at time t0 (ancient: defined for all earlier times)"""
    radius = shrinking_sphere(R0, n)
    return BarrierCurve(
        kind=BarrierKind.SPHERE,
        params={'R0': R0, 'n': n, 'center_x': center_x, 't0': t0},
        generator=lambda t: round_profile(center_x, radius(t - t0), spacing),
        lifespan=(-math.inf, t0 + radius.extinction),
    )


def cylinder_barrier(u0: float, n: int, x_lo: float, x_hi: float, spacing: float = 0.05,
                     t0: float = 0.0) -> BarrierCurve:
    """Shrinking cylinder over [x_lo, x_hi] (open ends)"""
    if x_hi <= x_lo:
        raise BarrierError("cylinder needs x_lo < x_hi")
    radius = shrinking_cylinder(u0, n)
    count = max(int(math.ceil((x_hi - x_lo) / spacing)) + 1, 9)
    x = np.linspace(x_lo, x_hi, count)
    return BarrierCurve(
        kind=BarrierKind.CYLINDER,
        params={'u0': u0, 'n': n, 'x_lo': x_lo, 'x_hi': x_hi, 't0': t0},
        generator=lambda t: ProfileGraph(x, np.full_like(x, radius(t - t0)), (False, False)),
        lifespan=(-math.inf, t0 + radius.extinction),
    )


# ==================== CATENOID ====================

def _catenoid_integrand(sigma: float, n: int) -> float:
    # s = 1 + sigma^2 removes the endpoint singularity of ds / sqrt(s^{2(n-1)} - 1)
    if sigma < 1e-8:
        return 2.0 / math.sqrt(2.0 * (n - 1))
    return 2.0 * sigma / math.sqrt(math.expm1(2.0 * (n - 1) * math.log1p(sigma * sigma)))


def _check_catenoid(n: int, c: float) -> None:
    if n == 2:
        raise BarrierError("entire catenoid: no slab")
    if n < 3:
        raise BarrierError("catenoid needs n >= 3")
    if c <= 0:
        raise BarrierError("catenoid neck radius must be positive")


def catenoid_half_width(n: int, c: float = 1.0) -> float:
    """Half-width of the slab containing the catenoid, c * int_1^inf ds / sqrt(s^{2(n-1)} - 1)"""
    _check_catenoid(n, c)
    value, _ = quad(_catenoid_integrand, 0.0, math.inf, args=(n,), epsabs=1e-13, epsrel=1e-12, limit=200)
    return c * value


def catenoid_profile(n: int, c: float, r_max: float, nodes: int = CATENOID_NODES) -> ParamCurve:
    """
    Both branches of the catenoid profile, left to right through the neck (0, c).

    Args:
        n: dimension, >= 3
        c: neck radius
        r_max: height where the branches are cut
        nodes: total node count (odd keeps the neck on a node)
    """
    _check_catenoid(n, c)
    if r_max <= c:
        raise BarrierError("r_max must exceed the neck radius")

    half = max(nodes // 2, 8)
    sigma_max = math.sqrt(r_max / c - 1.0)
    sigma = np.linspace(0.0, sigma_max, half + 1)
    pieces = [quad(_catenoid_integrand, a, b, args=(n,), epsabs=1e-14, epsrel=1e-13)[0]
              for a, b in zip(sigma[:-1], sigma[1:])]
    x = c * np.concatenate(([0.0], np.cumsum(pieces)))
    r = c * (1.0 + sigma * sigma)

    xs = np.concatenate((-x[:0:-1], x))
    rs = np.concatenate((r[:0:-1], r))
    return ParamCurve(np.column_stack((xs, rs)), closed=False)


def _stencil(f: np.ndarray) -> tuple:
    # fourth-order central differences in the node index
    d1 = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / 12.0
    d2 = (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2] + 16.0 * f[3:-1] - f[4:]) / 12.0
    return d1, d2


def catenoid_speed_residual(n: int, c: float, r_max: float, nodes: int = CATENOID_NODES) -> np.ndarray:
    """
    kappa + (n - 1) cos(theta)/r at the interior nodes of the sampled catenoid_profile.

    The profile is smooth in its node index through the neck, so kappa and
    theta come from finite differences of the stored points; curvature does
    not depend on the parametrisation.
    """
    curve = catenoid_profile(n, c, r_max, nodes)
    x1, x2 = _stencil(curve.x)
    r1, r2 = _stencil(curve.r)
    speed = np.hypot(x1, r1)
    kappa = -(x1 * r2 - r1 * x2) / speed ** 3
    cos_theta = x1 / speed
    return kappa + (n - 1) * cos_theta / curve.r[2:-2]


def catenoid_barrier(n: int, c: float, r_max: float, center_x: float = 0.0,
                     nodes: int = CATENOID_NODES) -> BarrierCurve:
    """Static catenoid as a graph r = u(x) with open ends at r_max"""
    curve = catenoid_profile(n, c, r_max, nodes)
    graph = ProfileGraph(curve.x + center_x, curve.r, (False, False))
    return BarrierCurve(
        kind=BarrierKind.CATENOID,
        params={'n': n, 'c': c, 'r_max': r_max, 'center_x': center_x},
        generator=lambda t: graph,
    )


# ==================== GRIM ROTATION ====================

def grim_rotation_profile(scale: float, tip_r: float, n: int = 3, nodes: int = 401) -> BarrierCurve:
    """
    Grim reaper r = tip_r + t/scale - scale ln cos(x/scale) translating in +r.

    Approximate: the forcing term is ignored; see grim_forcing_deficit.
    """
    if tip_r < 1.0:
        raise BarrierError("grim-reaper tip must stay a unit distance from the axis")
    if scale <= 0:
        raise BarrierError("scale must be positive")
    x = 0.5 * math.pi * scale * np.linspace(-0.999, 0.999, nodes)
    lift = -scale * np.log(np.cos(x / scale))

    def generator(t: float) -> ParamCurve:
        return ParamCurve(np.column_stack((x, tip_r + t / scale + lift)), closed=False)

    return BarrierCurve(
        kind=BarrierKind.GRIM_ROTATION,
        params={'scale': scale, 'tip_r': tip_r, 'n': n, 'slab_width': math.pi * scale},
        generator=generator,
        lifespan=(-scale * (tip_r - 1.0), math.inf),
        approximate=True,
    )


def grim_forcing_deficit(barrier: BarrierCurve, t: float) -> np.ndarray:
    """Signed (n - 1) cos(theta)/r along the grim reaper at time t"""
    if barrier.kind is not BarrierKind.GRIM_ROTATION:
        raise BarrierError("forcing deficit is defined for grim rotations only")
    curve = barrier.profile(t)
    scale = barrier.params['scale']
    n = barrier.params['n']
    cos_theta = np.cos(curve.x / scale)
    return (n - 1) * cos_theta / curve.r


# ==================== STATIC PIECES ====================

def pancake_slab(half_width: float, center: float = 0.0, height: float = 1e3) -> BarrierCurve:
    """Static planes x = center +- half_width, joined far above the flow"""
    if half_width <= 0:
        raise BarrierError("slab half-width must be positive")
    lo, hi = center - half_width, center + half_width
    pts = np.array([[lo, 0.0], [lo, height], [hi, height], [hi, 0.0]])
    curve = ParamCurve(pts, closed=False)
    return BarrierCurve(
        kind=BarrierKind.PANCAKE_SLAB,
        params={'half_width': half_width, 'center': center, 'height': height},
        generator=lambda t: curve,
    )


def frozen_profile(curve: ProfileGraph) -> BarrierCurve:
    """A fixed curve used as a static reference"""
    return BarrierCurve(
        kind=BarrierKind.FROZEN_PROFILE,
        params={'x_lo': float(curve.nodes[0]), 'x_hi': float(curve.nodes[-1])},
        generator=lambda t: curve,
    )
