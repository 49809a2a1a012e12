"""
Pancake Model
Synthetic ancient-pancake profiles and their width/girth asymptotics
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from pancake_lab.curve_core import ProfileGraph, count_critical_points, resample
from pancake_lab.errors import ConstructionError
from pancake_lab.flow_engine import FlowEngine
from .shapes import CapShape, build_shape

logger = logging.getLogger("pancake_lab.pancake_model")

ASYMPTOTIC_REGIME = -10.0
DESK_GIRTH_OFFSET = 15.0


class CapStyle(str, Enum):
    SEMICIRCLE = 'semicircle'
    GRIM_REAPER = 'grim-reaper'


class GirthLaw(str, Enum):
    DESK = 'desk'
    ASYMPTOTIC = 'asymptotic'


def girth_asymptotic(t: float, n: int, c_n: float = 0.0) -> float:
    """
    g(t) = -t + (n - 1) ln(-t) + c_n, valid for t <= -10

    Raises:
        ConstructionError: t outside the asymptotic regime
    """
    if t > ASYMPTOTIC_REGIME:
        raise ConstructionError("asymptotic regime only")
    return -t + (n - 1) * math.log(-t) + c_n


def width_asymptotic(n: int) -> float:
    """Limiting slab width 2*pi (independent of n)"""
    return 2.0 * math.pi


def desk_girth(s: float, offset: float = DESK_GIRTH_OFFSET) -> float:
    """Desk-scale girth g(s) = -s + offset; s = -5 gives 20"""
    return -s + offset


@dataclass(frozen=True)
class PancakeSpec:
    """
    Parameters of one synthetic pancake.

    Args:
        n: dimension, >= 2
        s: construction time, < 0
        width_w: slab width
        girth_g: girth, > width_w
        c_n: asymptotic constant
        cap_style: semicircle | grim-reaper
    """
    n: int
    s: float
    width_w: float
    girth_g: float
    c_n: float = 0.0
    cap_style: CapStyle = CapStyle.SEMICIRCLE

    def __post_init__(self):
        object.__setattr__(self, 'cap_style', CapStyle(self.cap_style))
        if self.n < 2:
            raise ConstructionError("n must be >= 2")
        if self.s >= 0:
            raise ConstructionError("construction time s must be negative")
        if self.width_w <= 0:
            raise ConstructionError("width must be positive")
        if self.girth_g <= self.width_w:
            raise ConstructionError("degenerate pancake")

    @classmethod
    def from_schedule(cls, s: float, n: int = 3, width: Optional[float] = None,
                      c_n: float = 0.0, cap_style: str = 'semicircle',
                      girth_law: str = 'desk', girth_offset: float = DESK_GIRTH_OFFSET) -> "PancakeSpec":
        """Spec whose girth follows the chosen girth law at time s"""
        width = width_asymptotic(n) if width is None else width
        if GirthLaw(girth_law) is GirthLaw.ASYMPTOTIC:
            girth = girth_asymptotic(s, n, c_n)
        else:
            girth = desk_girth(s, girth_offset)
        return cls(n=n, s=s, width_w=width, girth_g=girth, c_n=c_n, cap_style=CapStyle(cap_style))

    def shape(self, center_x: float) -> CapShape:
        return build_shape(self.cap_style.value, center_x, self.width_w, self.girth_g)

    def to_dict(self) -> dict:
        return {'n': self.n, 's': self.s, 'width_w': self.width_w, 'girth_g': self.girth_g,
                'c_n': self.c_n, 'cap_style': self.cap_style.value}


def symmetrized(graph: ProfileGraph, center: float) -> ProfileGraph:
    """Average a graph with its mirror image about x = center (same node count)"""
    x = 0.5 * (graph.nodes + (2.0 * center - graph.nodes[::-1]))
    u = 0.5 * (graph.heights + graph.heights[::-1])
    ends = graph.closed_ends
    if ends[0]:
        u[0] = 0.0
    if ends[1]:
        u[-1] = 0.0
    return ProfileGraph(x, u, ends)


def profile_from_shape(shape: CapShape, spacing: float, samples: int = 6001) -> ProfileGraph:
    dense = shape.dense_points(samples)
    raw = ProfileGraph(dense[:, 0], dense[:, 1], (True, True))
    return symmetrized(resample(raw, spacing), shape.center)


def make_pancake(spec: PancakeSpec, center_x: float, spacing: float) -> ProfileGraph:
    """
    Closed graphical pancake on [center_x - w/2, center_x + w/2].

    Raises:
        ConstructionError: spacing not below width/16
    """
    if spacing >= spec.width_w / 16.0:
        raise ConstructionError(f"spacing {spacing} must be below width/16 ({spec.width_w / 16.0:.6g})")
    return profile_from_shape(spec.shape(center_x), spacing)


def anneal(profile: ProfileGraph, burn_time: float, engine: FlowEngine) -> ProfileGraph:
    """
    Relax a synthetic profile by the flow for burn_time.

    Raises:
        ConstructionError: pinch or extinction during burn-in (event attached),
            or a burn-in that raised the critical-point count
    """
    if burn_time < 0:
        raise ConstructionError("burn time must be non-negative")
    if burn_time == 0:
        return profile

    before = count_critical_points(profile)
    trace = engine.evolve(profile, max_time=burn_time)
    topology = trace.topology_events()
    if topology or trace.final.count != 1:
        event = topology[0] if topology else None
        kind = event.kind.value if event else 'component change'
        raise ConstructionError(f"burn-in hit a {kind} event", event=event)

    relaxed = trace.final.components[0]
    after = count_critical_points(relaxed)
    if after.total > before.total:
        raise ConstructionError(f"burn-in raised critical points from {before.total} to {after.total}")
    logger.debug("burn-in kept %d critical points", after.total)
    return relaxed
