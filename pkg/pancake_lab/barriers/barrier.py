"""
Barrier Curves
Time-indexed comparison profiles with a lifespan
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Tuple, Union

from pancake_lab.curve_core import ParamCurve, ProfileGraph
from pancake_lab.errors import BarrierError

Profile = Union[ProfileGraph, ParamCurve]


class BarrierKind(Enum):
    SPHERE = 'sphere'
    CYLINDER = 'cylinder'
    CATENOID = 'catenoid'
    GRIM_ROTATION = 'grim-rotation'
    TORUS_SHRINKER = 'torus-shrinker'
    PANCAKE_SLAB = 'pancake-slab'
    FROZEN_PROFILE = 'frozen-profile'


STATIC_KINDS = {BarrierKind.CATENOID, BarrierKind.PANCAKE_SLAB, BarrierKind.FROZEN_PROFILE}
EXACT_KINDS = {BarrierKind.SPHERE, BarrierKind.CYLINDER, BarrierKind.CATENOID,
               BarrierKind.TORUS_SHRINKER, BarrierKind.PANCAKE_SLAB}


@dataclass(frozen=True)
class BarrierCurve:
    """
    A comparison solution.

    Args:
        kind: barrier family
        params: named scalars (neck radius, dimension, initial radius, ...)
        generator: t -> profile, only called inside the lifespan
        lifespan: [start, end) of times on which the profile exists
        approximate: true for sub/super-solutions that ignore a term
    """
    kind: BarrierKind
    params: Dict[str, float]
    generator: Callable[[float], Profile] = field(repr=False, compare=False)
    lifespan: Tuple[float, float] = (-math.inf, math.inf)
    approximate: bool = False

    @property
    def name(self) -> str:
        parts = ','.join(f"{k}={v:.6g}" for k, v in sorted(self.params.items()))
        return f"{self.kind.value}({parts})"

    @property
    def static(self) -> bool:
        return self.kind in STATIC_KINDS

    @property
    def exact(self) -> bool:
        return self.kind in EXACT_KINDS

    def alive(self, t: float) -> bool:
        lo, hi = self.lifespan
        return lo <= t < hi

    def profile(self, t: float) -> Profile:
        """
        Raises:
            BarrierError: t outside the lifespan
        """
        if not self.alive(t):
            raise BarrierError(f"{self.kind.value} barrier undefined at t={t} (lifespan {self.lifespan})")
        return self.generator(t)
