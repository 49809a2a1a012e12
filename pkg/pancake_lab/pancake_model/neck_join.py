"""
Neck Join
Glue two mirrored pancakes with a circular arc tangent to both carved flanks
"""
import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
import shapely
from scipy.optimize import brentq

from pancake_lab.curve_core import ProfileGraph, count_critical_points, resample, to_polygon
from pancake_lab.errors import ConstructionError, CurveError
from .pancake import PancakeSpec
from .shapes import CapShape, EllipticalCap

logger = logging.getLogger("pancake_lab.neck_join")

NEWTON_ITERATIONS = 100
TANGENCY_TOL = 1e-9
MONOTONE_SAMPLES = 64


@dataclass(frozen=True)
class NeckJoinSpec:
    """
    Glued initial data: exactly one of rho (carve height) or m (neck minimum).

    Args:
        pancake: the pancake both halves are cut from
        rho: carve height in (rho_0, g)
        m: target neck minimum in (0, g)
        gap_half: distance of each inner cap tip from x = 0
        spacing: node spacing of the glued curve
        check_monotone: assert m(rho) increasing on a sample grid
    """
    pancake: PancakeSpec
    rho: Optional[float] = None
    m: Optional[float] = None
    gap_half: float = 1.0
    spacing: float = 0.05
    check_monotone: bool = True

    def __post_init__(self):
        if (self.rho is None) == (self.m is None):
            raise ConstructionError("give exactly one of rho or m")
        g = self.pancake.girth_g
        if self.m is not None and not 0.0 < self.m < g:
            raise ConstructionError(f"m={self.m} outside (0, {g})")
        if self.rho is not None and not 0.0 < self.rho < g:
            raise ConstructionError(f"rho={self.rho} outside (0, {g})")
        if self.gap_half <= 0:
            raise ConstructionError("gap_half must be positive")
        if self.spacing <= 0:
            raise ConstructionError("spacing must be positive")


@dataclass(frozen=True)
class TangentArc:
    """Circle centred on x = 0 tangent to the upper flank at (x_cut, rho)"""
    x_cut: float
    rho: float
    slope: float
    center_r: float
    radius: float
    residual: float

    @property
    def minimum(self) -> float:
        # c - R written without cancellation
        s = self.slope
        return self.rho - self.x_cut * s / (1.0 + math.sqrt(1.0 + s * s))

    @property
    def mismatch(self) -> float:
        """Angle between the arc tangent and the flank tangent at the cut"""
        arc_slope = self.x_cut / math.sqrt(self.radius ** 2 - self.x_cut ** 2)
        return abs(math.atan(arc_slope) - math.atan(self.slope))


@dataclass(frozen=True)
class JoinedProfile:
    """Glued profile with the arc metadata written into run manifests"""
    curve: ProfileGraph
    arc_center: Tuple[float, float]
    arc_radius: float
    m_achieved: float
    f_m_domain: Tuple[float, float]
    rho: float
    tangent_mismatch: float
    flank_curvature: float
    spec: Optional[NeckJoinSpec] = field(default=None, compare=False)

    @property
    def arc_curvature(self) -> float:
        return 1.0 / self.arc_radius

    def to_dict(self) -> dict:
        return {
            'arc_center': list(self.arc_center),
            'arc_radius': self.arc_radius,
            'm_achieved': self.m_achieved,
            'f_m_domain': list(self.f_m_domain),
            'rho': self.rho,
            'tangent_mismatch': self.tangent_mismatch,
            'flank_curvature': self.flank_curvature,
        }


def _newton_arc(x: float, rho: float, s: float) -> Tuple[float, float, float]:
    """Solve point-on-circle and tangency for (center height, radius)"""
    scale = max(1.0, abs(x) + abs(rho))
    c, R = rho + x, math.hypot(x, x)
    for _ in range(NEWTON_ITERATIONS):
        F = np.array([x * x + (rho - c) ** 2 - R * R, x - s * (c - rho)])
        J = np.array([[-2.0 * (rho - c), -2.0 * R], [-s, 0.0]])
        try:
            dc, dR = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        c, R = c + dc, abs(R + dR)
        if not (math.isfinite(c) and math.isfinite(R)):
            break
        if abs(dc) + abs(dR) <= 1e-15 * (scale + abs(c) + R):
            residual = abs(x * x + (rho - c) ** 2 - R * R)
            if residual <= TANGENCY_TOL * scale * scale:
                return c, R, residual
            break

    # bisection fallback on the tangency condition alone
    hi = rho + 1.0
    while x - s * (hi - rho) > 0.0:
        hi = rho + 2.0 * (hi - rho)
        if hi - rho > 1e15:
            raise ConstructionError("tangency solve failed to converge")
    c = brentq(lambda cc: x - s * (cc - rho), rho, hi, xtol=1e-14)
    R = math.hypot(x, c - rho)
    residual = abs(x * x + (rho - c) ** 2 - R * R)
    if residual > TANGENCY_TOL * scale * scale:
        raise ConstructionError(f"tangency solve failed to converge (residual {residual:.3g})")
    return c, R, residual


class NeckGeometry:
    """
    Upper cap shape at x > 0 and its mirror image at x < 0, carved below
    height rho between the inner flanks and bridged by a tangent arc.
    """

    def __init__(self, upper: CapShape):
        if upper.left <= 0.0:
            raise ConstructionError("upper shape must lie in x > 0")
        self.upper = upper

    @classmethod
    def from_pancake(cls, pancake: PancakeSpec, gap_half: float = 1.0) -> "NeckGeometry":
        return cls(pancake.shape(gap_half + 0.5 * pancake.width_w))

    @property
    def girth(self) -> float:
        return self.upper.girth

    def arc(self, rho: float) -> TangentArc:
        if not 0.0 < rho < self.girth:
            raise ConstructionError(f"rho={rho} outside (0, {self.girth})")
        x = self.upper.level_x(rho, side=-1)
        s = self.upper.slope(x)
        if s <= 0.0:
            raise ConstructionError("inner flank must rise toward the pancake centre")
        c, R, residual = _newton_arc(x, rho, s)
        return TangentArc(x_cut=x, rho=rho, slope=s, center_r=c, radius=R, residual=residual)

    def m_of_rho(self, rho: float) -> float:
        return self.arc(rho).minimum

    def _bracket(self) -> Tuple[float, float]:
        return 1e-9 * self.girth, self.girth * (1.0 - 1e-9)

    def rho_floor(self) -> float:
        """Carve height whose tangent arc touches the axis"""
        return self.floor

    @cached_property
    def floor(self) -> float:
        lo, hi = self._bracket()
        f_lo, f_hi = self.m_of_rho(lo), self.m_of_rho(hi)
        if not (f_lo < 0.0 < f_hi):
            raise ConstructionError("geometry inconsistent")
        return brentq(self.m_of_rho, lo, hi, xtol=1e-14, rtol=1e-15)

    def rho_interval(self) -> Tuple[float, float]:
        return self.rho_floor(), self.girth

    def m_interval(self) -> Tuple[float, float]:
        """Neck minima reachable by carving, (0, m(g-))"""
        return 0.0, self.m_of_rho(self._bracket()[1])

    def check(self, m: Optional[float] = None, rho: Optional[float] = None) -> None:
        """
        Raises:
            ConstructionError: m or rho outside its valid interval (named in the message)
        """
        if m is not None:
            lo, hi = self.m_interval()
            if not lo < m < hi:
                raise ConstructionError(f"m={m} outside the reachable interval ({lo:.6g}, {hi:.6g})")
        if rho is not None:
            lo, hi = self.rho_interval()
            if not lo < rho < hi:
                raise ConstructionError(f"rho={rho} outside the valid interval ({lo:.6g}, {hi:.6g})")

    def rho_for(self, m: float) -> float:
        """Invert m -> rho on (rho_0, g)"""
        self.check(m=m)
        lo = self.rho_floor()
        hi = self._bracket()[1]
        return brentq(lambda r: self.m_of_rho(r) - m, lo, hi, xtol=1e-14, rtol=1e-15)

    def monotone(self, samples: int = MONOTONE_SAMPLES) -> bool:
        lo = self.rho_floor()
        hi = self._bracket()[1]
        grid = np.linspace(lo, hi, samples + 2)[1:-1]
        values = np.array([self.m_of_rho(r) for r in grid])
        return bool(np.all(np.diff(values) > 0.0))

    def build(self, rho: float, spacing: float) -> JoinedProfile:
        self.check(rho=rho)
        arc = self.arc(rho)
        if arc.mismatch > TANGENCY_TOL:
            raise ConstructionError(f"tangent mismatch {arc.mismatch:.3g} rad")

        # right half: arc from (0, m) to the cut, then the upper remnant
        psi_cut = math.asin(arc.x_cut / arc.radius)
        psi = np.linspace(0.0, psi_cut, 2001)
        arc_pts = np.column_stack((arc.radius * np.sin(psi), arc.center_r - arc.radius * np.cos(psi)))
        arc_pts[0] = (0.0, arc.minimum)
        arc_pts[-1] = (arc.x_cut, rho)

        flank = self.upper.dense_points(6001)
        flank = flank[flank[:, 0] > arc.x_cut + 1e-7 * spacing]
        half_pts = np.vstack((arc_pts, flank))

        try:
            half = ProfileGraph(half_pts[:, 0], half_pts[:, 1], (False, True))
            half = resample(half, min(spacing, half.length() / 8.0))
            curve = ProfileGraph(
                np.concatenate((-half.nodes[:0:-1], half.nodes)),
                np.concatenate((half.heights[:0:-1], half.heights)),
                (True, True),
            )
        except CurveError as exc:
            raise ConstructionError(f"gluing produced fold: {exc}") from exc

        crit = count_critical_points(curve)
        if (crit.maxima, crit.minima) != (2, 1):
            raise ConstructionError(
                f"gluing produced fold: {crit.maxima} maxima, {crit.minima} minima"
            )

        return JoinedProfile(
            curve=curve,
            arc_center=(0.0, arc.center_r),
            arc_radius=arc.radius,
            m_achieved=arc.minimum,
            f_m_domain=(-arc.x_cut, arc.x_cut),
            rho=rho,
            tangent_mismatch=arc.mismatch,
            flank_curvature=self.upper.curvature(arc.x_cut),
        )


def rho_floor(spec: NeckJoinSpec) -> float:
    """rho_0(s): carve height at which the tangent arc's minimum reaches the axis"""
    return NeckGeometry.from_pancake(spec.pancake, spec.gap_half).rho_floor()


def join(spec: NeckJoinSpec) -> JoinedProfile:
    """
    Build the glued profile.

    Raises:
        ConstructionError: parameter outside its interval, tangency failure,
            non-monotone m(rho) when checked, or a fold in the spliced curve
    """
    geometry = NeckGeometry.from_pancake(spec.pancake, spec.gap_half)
    if spec.check_monotone and not geometry.monotone():
        raise ConstructionError("neck minimum not monotone in carve height")
    rho = spec.rho if spec.rho is not None else geometry.rho_for(spec.m)
    joined = geometry.build(rho, spec.spacing)
    logger.debug("joined profile rho=%.9g m=%.9g R=%.9g", rho, joined.m_achieved, joined.arc_radius)
    return replace(joined, spec=spec)


def dumbbell_geometry(radius: float, gap_half: float = 1.0) -> NeckGeometry:
    """Round sphere of the given radius beside the gap, mirrored across x = 0"""
    return NeckGeometry(EllipticalCap(gap_half + radius, 2.0 * radius, radius))


def make_dumbbell(radius: float, m: float, spacing: float, gap_half: float = 1.0) -> JoinedProfile:
    """Two round spheres of the given radius joined by a neck of minimum m"""
    geometry = dumbbell_geometry(radius, gap_half)
    return geometry.build(geometry.rho_for(m), spacing)


def nesting_check(a: JoinedProfile, b: JoinedProfile) -> bool:
    """
    True iff every node of a lies inside or on the region of b, with the
    node spacing as tolerance.
    """
    tol = float(max(a.curve.spacings().max(), b.curve.spacings().max()))
    region = to_polygon(b.curve).buffer(tol)
    x, r = a.curve.nodes, a.curve.heights
    return bool(np.all(shapely.intersects_xy(region, x, r)))
