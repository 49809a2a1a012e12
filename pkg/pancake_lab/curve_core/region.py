"""
Regions
Axis-aligned rectangles of the (x, r) half-plane used to clip curves
"""
import math
from dataclasses import dataclass

import numpy as np

from pancake_lab.errors import CurveError


@dataclass(frozen=True)
class Region:
    """
    Rectangle [x_lo, x_hi] x [r_lo, r_hi]; bounds may be infinite.

    C_R is Region(r_hi=R), D_c is Region(r_lo=c).
    """
    x_lo: float = -math.inf
    x_hi: float = math.inf
    r_lo: float = -math.inf
    r_hi: float = math.inf

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise CurveError(f"region x-bounds out of order: {self.x_lo} >= {self.x_hi}")
        if not self.r_lo < self.r_hi:
            raise CurveError(f"region r-bounds out of order: {self.r_lo} >= {self.r_hi}")

    @classmethod
    def everywhere(cls) -> "Region":
        return cls()

    @classmethod
    def below(cls, R: float) -> "Region":
        """C_R = {r < R}"""
        return cls(r_hi=R)

    @classmethod
    def above(cls, c: float) -> "Region":
        """D_c = {r > c}"""
        return cls(r_lo=c)

    @property
    def off_axis(self) -> bool:
        """True when the closure stays away from r = 0"""
        return self.r_lo > 0.0

    def mask(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of the rows of `points` inside the region"""
        pts = np.asarray(points, dtype=float)
        return (
            (pts[:, 0] >= self.x_lo) & (pts[:, 0] <= self.x_hi)
            & (pts[:, 1] >= self.r_lo) & (pts[:, 1] <= self.r_hi)
        )

    def clip(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts[self.mask(pts)]
