"""
Shooting Results
Classification labels and the record of one bisection
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from pancake_lab.flow_engine import FlowTrace


class Label(Enum):
    ONE = 'one-component'
    TWO = 'two-components'
    UNDETERMINED = 'undetermined'


@dataclass(frozen=True)
class Classification:
    """
    Outcome of one classified flow.

    T_m is the threshold time (None when the run stopped before reaching it).
    """
    m: float
    label: Label
    T_m: Optional[float] = None
    reason: str = ''
    trace: Optional[FlowTrace] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {'m': self.m, 'label': self.label.value, 'T_m': self.T_m, 'reason': self.reason}


@dataclass
class ShootResult:
    """
    One construction time: samples, bracket, m*, and the old flow once built.

    anomalies holds non-monotone label pairs; notes holds the other findings
    (neck outside the band at t = 0, lifespan out of order) that mark the run suspect.
    """
    s: float
    threshold: float
    tol_m: float
    samples: List[Classification] = field(default_factory=list)
    bracket: Tuple[float, float] = (0.0, 0.0)
    iterations: int = 0
    anomalies: List[Tuple[float, float]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    m_bar: Optional[float] = None
    T: Optional[float] = None
    neck_at_zero: Optional[float] = None
    recentered_trace: Optional[FlowTrace] = field(default=None, repr=False)

    @property
    def m_star(self) -> float:
        return 0.5 * (self.bracket[0] + self.bracket[1])

    @property
    def width(self) -> float:
        return self.bracket[1] - self.bracket[0]

    @property
    def suspect(self) -> bool:
        return bool(self.anomalies or self.notes)

    def sorted_samples(self) -> List[Classification]:
        return sorted(self.samples, key=lambda c: c.m)

    def neck_span(self) -> Optional[Tuple[float, float]]:
        """min and max of m(t) over the recentered trace"""
        if self.recentered_trace is None:
            return None
        values = [snap.neck_value() for snap in self.recentered_trace.snapshots]
        return min(values), max(values)

    def to_dict(self) -> dict:
        span = self.neck_span()
        return {
            's': self.s,
            'threshold': self.threshold,
            'tol_m': self.tol_m,
            'samples': [c.to_dict() for c in self.samples],
            'bracket': list(self.bracket),
            'm_star': self.m_star,
            'width': self.width,
            'iterations': self.iterations,
            'anomalies': [list(a) for a in self.anomalies],
            'notes': list(self.notes),
            'suspect': self.suspect,
            'm_bar': self.m_bar,
            'T': self.T,
            'neck_at_zero': self.neck_at_zero,
            'neck_span': None if span is None else list(span),
        }


def monotonicity_anomalies(samples: List[Classification]) -> List[Tuple[float, float]]:
    """(m of a two-component label, m of a one-component label below it) pairs"""
    ordered = sorted((c for c in samples if c.label is not Label.UNDETERMINED), key=lambda c: c.m)
    anomalies = []
    lowest_one = None
    for c in ordered:
        if c.label is Label.ONE and lowest_one is None:
            lowest_one = c.m
        elif c.label is Label.TWO and lowest_one is not None:
            anomalies.append((c.m, lowest_one))
    return anomalies
