"""
Flow Events
Topological and bookkeeping events logged along an evolution
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List


class EventKind(Enum):
    """Kinds of flow events"""
    PINCH = 'pinch'
    SPLIT = 'split'
    CAP_EXTINCT = 'cap-extinct'
    COMPONENT_EXTINCT = 'component-extinct'
    THRESHOLD = 'threshold'
    ERROR = 'error'


@dataclass(frozen=True)
class FlowEvent:
    """One logged event at time t and location (x, r)"""
    t: float
    kind: EventKind
    x: float = 0.0
    r: float = 0.0
    detail: str = ''

    def line(self) -> str:
        """Event-log line `t=<value> kind=<kind> x=<value> r=<value>`"""
        return f"t={self.t!r} kind={self.kind.value} x={self.x!r} r={self.r!r}"

    def to_dict(self) -> Dict:
        return {'t': self.t, 'kind': self.kind.value, 'x': self.x, 'r': self.r, 'detail': self.detail}

    @classmethod
    def from_dict(cls, data: Dict) -> "FlowEvent":
        return cls(t=float(data['t']), kind=EventKind(data['kind']),
                   x=float(data['x']), r=float(data['r']), detail=data.get('detail', ''))


class EventProcessor:
    """Categorize and filter event sequences"""

    EVENT_CATEGORY = {
        EventKind.PINCH: 'topology',
        EventKind.SPLIT: 'topology',
        EventKind.CAP_EXTINCT: 'extinction',
        EventKind.COMPONENT_EXTINCT: 'extinction',
        EventKind.THRESHOLD: 'threshold',
        EventKind.ERROR: 'error',
    }

    @staticmethod
    def first(events: List[FlowEvent], kind: EventKind):
        for event in events:
            if event.kind is kind:
                return event
        return None

    @staticmethod
    def categorize_events(events: List[FlowEvent]) -> Dict[str, List[FlowEvent]]:
        """Group events by category"""
        categories = {'topology': [], 'extinction': [], 'threshold': [], 'error': []}
        for event in events:
            categories[EventProcessor.EVENT_CATEGORY[event.kind]].append(event)
        return categories

    @staticmethod
    def changes_topology(event: FlowEvent) -> bool:
        return EventProcessor.EVENT_CATEGORY[event.kind] in ('topology', 'extinction')
