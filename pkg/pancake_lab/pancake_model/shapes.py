"""
Pancake Shapes
Analytic cap profiles: half-ellipse and grim-reaper descents
"""
import math

import numpy as np
from scipy.optimize import brentq

from pancake_lab.errors import ConstructionError


class CapShape:
    """
    Analytic graph u(x) on [center - w/2, center + w/2], vanishing at both ends.

    Subclasses provide height, slope, inner abscissa of a level and a dense
    left-to-right sampling.
    """

    def __init__(self, center: float, width: float, girth: float):
        if width <= 0 or girth <= 0:
            raise ConstructionError("cap shape needs positive width and girth")
        self.center = float(center)
        self.width = float(width)
        self.girth = float(girth)

    @property
    def half_width(self) -> float:
        return 0.5 * self.width

    @property
    def left(self) -> float:
        return self.center - self.half_width

    @property
    def right(self) -> float:
        return self.center + self.half_width

    def height(self, x: float) -> float:
        raise NotImplementedError

    def slope(self, x: float) -> float:
        raise NotImplementedError

    def level_x(self, rho: float, side: int) -> float:
        """Abscissa where u = rho on the left (side = -1) or right (+1) flank"""
        raise NotImplementedError

    def dense_points(self, num: int = 4001) -> np.ndarray:
        raise NotImplementedError

    def curvature(self, x: float) -> float:
        """Signed curvature of the graph, positive where convex from below"""
        h = 1e-6 * self.width
        up = self.slope(x)
        upp = (self.slope(x + h) - self.slope(x - h)) / (2.0 * h)
        return float(-upp / (1.0 + up * up) ** 1.5)


class EllipticalCap(CapShape):
    """u = g * sqrt(1 - xi^2), xi = (x - center)/(w/2)"""

    def height(self, x: float) -> float:
        xi = (x - self.center) / self.half_width
        if abs(xi) >= 1.0:
            return 0.0
        return self.girth * math.sqrt(1.0 - xi * xi)

    def slope(self, x: float) -> float:
        xi = (x - self.center) / self.half_width
        if abs(xi) >= 1.0:
            raise ConstructionError("slope requested at a cap tip")
        return -self.girth * xi / (self.half_width * math.sqrt(1.0 - xi * xi))

    def level_x(self, rho: float, side: int) -> float:
        if not 0.0 <= rho <= self.girth:
            raise ConstructionError(f"level {rho} outside (0, girth)")
        return self.center + side * self.half_width * math.sqrt(1.0 - (rho / self.girth) ** 2)

    def dense_points(self, num: int = 4001) -> np.ndarray:
        phi = np.linspace(0.0, math.pi, num)
        x = self.center - self.half_width * np.cos(phi)
        r = self.girth * np.sin(phi)
        x[0], x[-1] = self.left, self.right
        r[0] = r[-1] = 0.0
        return np.column_stack((x, r))


class GrimReaperCap(CapShape):
    """
    u = g + a * ln cos((x - center)/a): flat top, grim-reaper descent.

    The scale a is chosen so that u vanishes exactly at center +- w/2.
    """

    def __init__(self, center: float, width: float, girth: float):
        super().__init__(center, width, girth)
        self.scale = self._solve_scale()

    def _solve_scale(self) -> float:
        w2, g = self.half_width, self.girth

        def residual(a: float) -> float:
            return a * math.acos(math.exp(-g / a)) - w2

        lo = w2 * 2.0 / math.pi
        hi = 2.0 * lo
        while residual(hi) <= 0.0:
            hi *= 2.0
            if hi > 1e6 * lo:
                raise ConstructionError("grim-reaper scale bracket not found")
        return brentq(residual, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    def height(self, x: float) -> float:
        xi = (x - self.center) / self.scale
        if abs(x - self.center) >= self.half_width:
            return 0.0
        return max(self.girth + self.scale * math.log(math.cos(xi)), 0.0)

    def slope(self, x: float) -> float:
        return -math.tan((x - self.center) / self.scale)

    def level_x(self, rho: float, side: int) -> float:
        if not 0.0 <= rho <= self.girth:
            raise ConstructionError(f"level {rho} outside (0, girth)")
        return self.center + side * self.scale * math.acos(math.exp((rho - self.girth) / self.scale))

    def dense_points(self, num: int = 4001) -> np.ndarray:
        a, g = self.scale, self.girth
        # slope 1 splits the x-sampled top from the r-sampled flanks
        x_knee = a * math.pi / 4.0
        r_knee = g + a * math.log(math.cos(math.pi / 4.0))
        third = max(num // 3, 8)

        xi = np.linspace(-x_knee, x_knee, third)
        top = np.column_stack((self.center + xi, g + a * np.log(np.cos(xi / a))))

        r = np.linspace(0.0, r_knee, third)[:-1]
        flank = a * np.arccos(np.exp((r - g) / a))
        left = np.column_stack((self.center - flank, r))
        right = np.column_stack((self.center + flank, r))[::-1]

        pts = np.vstack((left, top, right))
        pts[0] = (self.left, 0.0)
        pts[-1] = (self.right, 0.0)
        return pts


def build_shape(cap_style: str, center: float, width: float, girth: float) -> CapShape:
    """Shape factory keyed by cap style name"""
    if cap_style == 'semicircle':
        return EllipticalCap(center, width, girth)
    if cap_style == 'grim-reaper':
        return GrimReaperCap(center, width, girth)
    raise ConstructionError(f"unknown cap style: {cap_style}")

