"""
Curve Geometry
Curvature, intersection counts, critical points, areas and distances
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
import shapely
from scipy.spatial import cKDTree
from shapely.geometry import LinearRing, LineString, Polygon, box

from pancake_lab.errors import CurveError
from .curves import ParamCurve, ProfileGraph
from .region import Region

logger = logging.getLogger("pancake_lab.curve_core")

Curve = Union[ProfileGraph, ParamCurve]


# ==================== RESULT TYPES ====================

@dataclass(frozen=True)
class IntersectionCount:
    """Transverse crossings plus tangential near-contacts"""
    crossings: int
    contacts: int = 0

    @property
    def total(self) -> int:
        return self.crossings


@dataclass(frozen=True)
class CriticalPoints:
    """Strict interior extrema after plateau merging"""
    maxima: int
    minima: int
    locations: Tuple[float, ...] = ()
    kinds: Tuple[str, ...] = ()

    @property
    def total(self) -> int:
        return self.maxima + self.minima

    def abscissae(self, kind: str) -> List[float]:
        return [x for x, k in zip(self.locations, self.kinds) if k == kind]


@dataclass(frozen=True)
class HausdorffResult:
    """Distance, or the one-sided-empty outcome when a side misses the window"""
    value: Optional[float]
    one_sided_empty: bool = False

    @property
    def defined(self) -> bool:
        return not self.one_sided_empty


# ==================== CURVATURE ====================

def menger_curvature(prev: np.ndarray, cur: np.ndarray, nxt: np.ndarray) -> np.ndarray:
    """
    Signed circumcircle curvature of point triples (vectorized over rows).

    Positive when the turn from prev to nxt is clockwise, i.e. convex for a
    cap traversed left to right above the axis.
    """
    a = cur - prev
    b = nxt - cur
    c = nxt - prev
    cross = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    denom = np.hypot(a[..., 0], a[..., 1]) * np.hypot(b[..., 0], b[..., 1]) * np.hypot(c[..., 0], c[..., 1])
    return -2.0 * cross / denom


def curvature_at(curve: ProfileGraph, index: int) -> float:
    """
    Geodesic curvature at an interior node.

    Args:
        curve: profile graph
        index: node position, 0 < index < N - 1

    Returns:
        Signed curvature; positive where the region below the graph is convex
    """
    if index <= 0 or index >= curve.size - 1:
        raise CurveError("needs interior node")
    pts = curve.points
    return float(menger_curvature(pts[index - 1], pts[index], pts[index + 1]))


def graph_second_derivative(curve: ProfileGraph, index: int) -> float:
    """u_xx/(1 + u_x^2) at an interior node (the graph-equation diffusion term)"""
    if index <= 0 or index >= curve.size - 1:
        raise CurveError("needs interior node")
    x, u = curve.nodes, curve.heights
    hl = x[index] - x[index - 1]
    hr = x[index + 1] - x[index]
    ux = (u[index + 1] - u[index - 1]) / (hl + hr)
    uxx = 2.0 * (hl * u[index + 1] - (hl + hr) * u[index] + hr * u[index - 1]) / (hl * hr * (hl + hr))
    return float(uxx / (1.0 + ux * ux))


# ==================== INTERSECTIONS ====================

def _comparison_interval(a: ProfileGraph, b: ProfileGraph) -> Tuple[float, float]:
    lows = [g.nodes[0] for g in (a, b) if not g.closed_ends[0]]
    highs = [g.nodes[-1] for g in (a, b) if not g.closed_ends[1]]
    lo = max(lows) if lows else min(a.nodes[0], b.nodes[0])
    hi = min(highs) if highs else max(a.nodes[-1], b.nodes[-1])
    return lo, hi


def _extended(graph: ProfileGraph, grid: np.ndarray) -> np.ndarray:
    return np.interp(grid, graph.nodes, graph.heights, left=0.0, right=0.0)


def _count_sign_changes(grid: np.ndarray, d: np.ndarray, tol: float) -> IntersectionCount:
    sign = np.where(d > tol, 1, np.where(d < -tol, -1, 0))
    nonzero = np.flatnonzero(sign)
    crossings = int(np.count_nonzero(np.diff(sign[nonzero]))) if len(nonzero) > 1 else 0

    contacts = 0
    zero = sign == 0
    if zero.any():
        edges = np.diff(np.concatenate(([0], zero.astype(int), [0])))
        starts = np.flatnonzero(edges == 1)
        stops = np.flatnonzero(edges == -1) - 1
        for i, j in zip(starts, stops):
            if grid[j] - grid[i] > tol:
                raise CurveError("non-transverse overlap")
            if i == 0 or j == len(sign) - 1 or sign[i - 1] == sign[j + 1]:
                contacts += 1
    return IntersectionCount(crossings=crossings, contacts=contacts)


def _graph_intersections(a: ProfileGraph, b: ProfileGraph, tol: float) -> IntersectionCount:
    lo, hi = _comparison_interval(a, b)
    if hi <= lo:
        return IntersectionCount(0, 0)

    grid = np.union1d(a.nodes, b.nodes)
    grid = grid[(grid >= lo) & (grid <= hi)]
    grid = np.union1d(grid, [lo, hi])
    keep = np.concatenate(([True], np.diff(grid) > tol))
    grid = grid[keep]

    ua = _extended(a, grid)
    ub = _extended(b, grid)

    # both curves on the axis beyond their caps
    live = np.flatnonzero((ua > tol) | (ub > tol))
    if len(live) == 0:
        return IntersectionCount(0, 0)
    sl = slice(live[0], live[-1] + 1)
    return _count_sign_changes(grid[sl], ua[sl] - ub[sl], tol)


def _as_line(curve: Curve):
    if isinstance(curve, ParamCurve) and curve.closed:
        return LinearRing(curve.points)
    return LineString(curve.points)


def _enclosure(curve: Curve) -> Optional[Polygon]:
    if isinstance(curve, ProfileGraph) and curve.closed:
        return to_polygon(curve)
    if isinstance(curve, ParamCurve) and curve.closed:
        return to_polygon(curve)
    return None


def _segment_intersections(a: Curve, b: Curve, tol: float) -> IntersectionCount:
    la, lb = _as_line(a), _as_line(b)
    inter = la.intersection(lb)
    if inter.is_empty:
        return IntersectionCount(0, 0)

    hits = []
    for part in shapely.get_parts(inter):
        if part.geom_type == 'Point':
            hits.append(part)
        elif part.length > tol:
            raise CurveError("non-transverse overlap")
        else:
            hits.append(part.centroid)

    region = _enclosure(b)
    guide = la
    if region is None:
        region = _enclosure(a)
        guide = lb
    if region is None:
        return IntersectionCount(crossings=len(hits), contacts=0)

    step = 0.25 * min(np.median(_as_segments(a)), np.median(_as_segments(b)))
    crossings = contacts = 0
    for hit in hits:
        s = guide.project(hit)
        before = guide.interpolate(max(s - step, 0.0))
        after = guide.interpolate(min(s + step, guide.length))
        if region.contains(before) != region.contains(after):
            crossings += 1
        else:
            contacts += 1
    return IntersectionCount(crossings=crossings, contacts=contacts)


def _as_segments(curve: Curve) -> np.ndarray:
    if isinstance(curve, ProfileGraph):
        return curve.spacings()
    return curve.segments()


def count_intersections(a: Curve, b: Curve, tol: float) -> IntersectionCount:
    """
    Count transverse intersections of two curves.

    Graph pairs compare heights on the union grid (closed graphs extend by 0
    beyond their caps, open graphs bound the interval); other pairs use
    segment intersection.

    Raises:
        CurveError: overlapping pieces longer than tol
    """
    if tol <= 0:
        raise CurveError("tol must be positive")
    if isinstance(a, ProfileGraph) and isinstance(b, ProfileGraph):
        return _graph_intersections(a, b, tol)
    return _segment_intersections(a, b, tol)


# ==================== CRITICAL POINTS ====================

def count_critical_points(curve: ProfileGraph, plateau_tol: Optional[float] = None) -> CriticalPoints:
    """
    Strict interior extrema of the heights after merging plateaus.

    Args:
        curve: profile graph
        plateau_tol: height variation merged into one extremum
            (default 1e-9 x diameter)
    """
    if plateau_tol is None:
        plateau_tol = 1e-9 * curve.diameter()
    x, u = curve.nodes, curve.heights

    groups = []
    start = 0
    for j in range(1, len(u) + 1):
        if j == len(u) or abs(u[j] - u[start]) >= plateau_tol:
            groups.append((start, j - 1))
            start = j

    if len(groups) == 1:
        return CriticalPoints(1, 0, (float(0.5 * (x[0] + x[-1])),), ('max',))

    values = [float(u[i:j + 1].mean()) for i, j in groups]
    centers = [float(0.5 * (x[i] + x[j])) for i, j in groups]

    locations, kinds = [], []
    for k in range(1, len(groups) - 1):
        if values[k] > values[k - 1] and values[k] > values[k + 1]:
            locations.append(centers[k])
            kinds.append('max')
        elif values[k] < values[k - 1] and values[k] < values[k + 1]:
            locations.append(centers[k])
            kinds.append('min')

    return CriticalPoints(
        maxima=kinds.count('max'),
        minima=kinds.count('min'),
        locations=tuple(locations),
        kinds=tuple(kinds),
    )


# ==================== AREAS ====================

def to_polygon(curve: Curve) -> Polygon:
    """Closed region between a curve and the axis (or inside a closed ParamCurve)"""
    pts = np.asarray(curve.points, dtype=float)
    closed_loop = isinstance(curve, ParamCurve) and curve.closed
    if not closed_loop:
        if pts[-1, 1] != 0.0:
            pts = np.vstack((pts, [pts[-1, 0], 0.0]))
        if pts[0, 1] != 0.0:
            pts = np.vstack(([pts[0, 0], 0.0], pts))
    poly = Polygon(pts)
    if not poly.is_valid:
        poly = shapely.make_valid(poly)
    return poly


def enclosed_area_above(curve: Curve, c: float) -> float:
    """
    Area of the enclosed region restricted to r > c.

    Args:
        curve: a single closed component
        c: cut height, c >= 0
    """
    if c < 0:
        raise CurveError("cut height must be non-negative")
    if isinstance(curve, ProfileGraph) and not curve.closed:
        raise CurveError("component must be closed")
    if isinstance(curve, ParamCurve) and not curve.closed and (curve.r[0] != 0.0 or curve.r[-1] != 0.0):
        raise CurveError("component must be closed")

    poly = to_polygon(curve)
    minx, miny, maxx, maxy = poly.bounds
    if maxy <= c:
        return 0.0
    clip = box(minx - 1.0, c, maxx + 1.0, maxy + 1.0)
    return float(poly.intersection(clip).area)


def clipped_components(curve: Curve, c: float) -> int:
    """Number of connected pieces of the region above r = c"""
    poly = to_polygon(curve)
    minx, miny, maxx, maxy = poly.bounds
    if maxy <= c:
        return 0
    clipped = poly.intersection(box(minx - 1.0, c, maxx + 1.0, maxy + 1.0))
    return sum(1 for part in shapely.get_parts(clipped) if part.area > 0.0)


def turning_number_above(curve: Curve, c: float) -> float:
    """
    Largest |total tangent rotation| / 2*pi over the arcs of the curve in r > c.
    """
    pts = np.asarray(curve.points, dtype=float)
    above = pts[:, 1] > c
    if not above.any():
        return 0.0
    angles = np.unwrap(np.arctan2(np.diff(pts[:, 1]), np.diff(pts[:, 0])))
    seg_above = above[:-1] & above[1:]

    best = 0.0
    edges = np.diff(np.concatenate(([0], seg_above.astype(int), [0])))
    for i, j in zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)):
        if j - i >= 2:
            best = max(best, abs(angles[j - 1] - angles[i]) / (2.0 * np.pi))
    return float(best)


# ==================== DISTANCES ====================

def _cloud(curve) -> np.ndarray:
    """Node array of a curve, or an (N, 2) array passed through"""
    return np.asarray(getattr(curve, 'points', curve), dtype=float).reshape(-1, 2)


def hausdorff_distance(a: Curve, b: Curve, window: Optional[Region] = None) -> HausdorffResult:
    """
    Symmetric Hausdorff distance of the node sets clipped to a window.
    """
    pa = _cloud(a)
    pb = _cloud(b)
    if window is not None:
        pa = window.clip(pa)
        pb = window.clip(pb)
    if len(pa) == 0 or len(pb) == 0:
        return HausdorffResult(value=None, one_sided_empty=True)

    d_ab = cKDTree(pb).query(pa)[0].max()
    d_ba = cKDTree(pa).query(pb)[0].max()
    return HausdorffResult(value=float(max(d_ab, d_ba)))


def min_distance(a: Curve, b: Curve, window: Optional[Region] = None) -> Optional[float]:
    """Smallest node-to-node distance, None when a side misses the window"""
    pa = _cloud(a)
    pb = _cloud(b)
    if window is not None:
        pa = window.clip(pa)
        pb = window.clip(pb)
    if len(pa) == 0 or len(pb) == 0:
        return None
    return float(cKDTree(pb).query(pa)[0].min())
