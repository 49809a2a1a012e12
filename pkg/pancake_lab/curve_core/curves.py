"""
Profile Curves
Discrete representations of profile curves in the half-plane {r >= 0}
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from pancake_lab.errors import CurveError


MIN_NODES = 8
SPACING_FACTOR = 4.0


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ProfileGraph:
    """
    Graph r = u(x) over a strictly increasing x-grid.

    Args:
        nodes: x-coordinates, strictly increasing
        heights: u_j >= 0, same length as nodes
        closed_ends: whether u = 0 at the (left, right) endpoint
    """
    nodes: np.ndarray
    heights: np.ndarray
    closed_ends: Tuple[bool, bool] = (True, True)

    def __post_init__(self):
        x = _frozen(self.nodes)
        u = _frozen(self.heights)
        object.__setattr__(self, 'nodes', x)
        object.__setattr__(self, 'heights', u)
        object.__setattr__(self, 'closed_ends', (bool(self.closed_ends[0]), bool(self.closed_ends[1])))

        if x.ndim != 1 or x.shape != u.shape:
            raise CurveError("nodes and heights must be 1-d arrays of equal length")
        if len(x) < MIN_NODES:
            raise CurveError(f"a profile needs at least {MIN_NODES} nodes, got {len(x)}")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(u)):
            raise CurveError("non-finite node")
        if np.any(np.diff(x) <= 0.0):
            raise CurveError("x-coordinates must be strictly increasing")
        if np.any(u < 0.0):
            raise CurveError("heights must be non-negative")
        if self.closed_ends[0] and u[0] != 0.0:
            raise CurveError("closed left end must sit on the axis")
        if self.closed_ends[1] and u[-1] != 0.0:
            raise CurveError("closed right end must sit on the axis")
        if np.any(u[1:-1] <= 0.0):
            raise CurveError("interior heights must be strictly positive")

    # ---- basic geometry -------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def points(self) -> np.ndarray:
        """(N, 2) array of (x, r) pairs"""
        return np.column_stack((self.nodes, self.heights))

    @property
    def closed(self) -> bool:
        """True when both ends are caps on the axis (a compact component)"""
        return self.closed_ends[0] and self.closed_ends[1]

    def spacings(self) -> np.ndarray:
        return np.hypot(np.diff(self.nodes), np.diff(self.heights))

    def length(self) -> float:
        return float(self.spacings().sum())

    def diameter(self) -> float:
        """Larger of the axial extent and the maximum height"""
        return float(max(self.nodes[-1] - self.nodes[0], self.heights.max()))

    def max_height(self) -> float:
        return float(self.heights.max())

    def height_at(self, x: float) -> float:
        """Linear interpolation; 0 outside closed ends"""
        if x < self.nodes[0] or x > self.nodes[-1]:
            return 0.0
        return float(np.interp(x, self.nodes, self.heights))

    def spacing_ok(self, factor: float = SPACING_FACTOR) -> bool:
        """Adjacent spacing within `factor` of the mean spacing"""
        ds = self.spacings()
        mean = ds.mean()
        return bool(ds.max() <= factor * mean and ds.min() >= mean / factor)

    # ---- rigid motions --------------------------------------------------

    def translated(self, dx: float) -> "ProfileGraph":
        return ProfileGraph(self.nodes + dx, self.heights, self.closed_ends)

    def mirrored(self, center: float = 0.0) -> "ProfileGraph":
        """Reflection x -> 2*center - x"""
        return ProfileGraph(
            (2.0 * center - self.nodes)[::-1],
            self.heights[::-1],
            (self.closed_ends[1], self.closed_ends[0]),
        )


@dataclass(frozen=True)
class ParamCurve:
    """
    Ordered polyline of (x, r) points.

    Args:
        points: (N, 2) array, r >= 0
        closed: closure from last point back to the first is implicit
    """
    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        pts = _frozen(self.points)
        object.__setattr__(self, 'points', pts)
        object.__setattr__(self, 'closed', bool(self.closed))

        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise CurveError("points must be an (N, 2) array with N >= 2")
        if not np.all(np.isfinite(pts)):
            raise CurveError("non-finite point")
        if np.any(pts[:, 1] < 0.0):
            raise CurveError("points must lie in the half-plane r >= 0")
        steps = np.hypot(*np.diff(pts, axis=0).T)
        if np.any(steps == 0.0):
            raise CurveError("consecutive points must be distinct")
        if self.closed and np.all(pts[0] == pts[-1]):
            raise CurveError("closed curve repeats its first point")

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def r(self) -> np.ndarray:
        return self.points[:, 1]

    def segments(self) -> np.ndarray:
        pts = self.points
        if self.closed:
            pts = np.vstack((pts, pts[:1]))
        return np.hypot(*np.diff(pts, axis=0).T)

    def length(self) -> float:
        return float(self.segments().sum())

    def scaled(self, factor: float) -> "ParamCurve":
        return ParamCurve(self.points * factor, self.closed)
