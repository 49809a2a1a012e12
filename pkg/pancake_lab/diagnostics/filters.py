"""
Violation Filters
Drop duplicates and sub-slack magnitudes before violations are reported
"""
from dataclasses import dataclass
from typing import Dict, List


@dataclass(frozen=True)
class Violation:
    """A law that failed at time t by `magnitude` (beyond its slack)"""
    t: float
    law: str
    magnitude: float

    def to_dict(self) -> Dict:
        return {'t': self.t, 'law': self.law, 'magnitude': self.magnitude}


class ViolationFilter:
    """Filter and validate violations"""

    @staticmethod
    def remove_duplicates(violations: List[Violation]) -> List[Violation]:
        """Remove repeated (t, law) entries while preserving order"""
        seen = set()
        filtered = []
        for v in violations:
            key = (v.t, v.law)
            if key not in seen:
                seen.add(key)
                filtered.append(v)
        return filtered

    @staticmethod
    def apply_slack(violations: List[Violation], slack: float = 0.0) -> List[Violation]:
        """Keep violations whose magnitude exceeds the law's slack"""
        return [v for v in violations if v.magnitude > slack]

    @staticmethod
    def validate(violation: Violation, context: Dict) -> bool:
        """
        Check a violation against the snapshot it came from.

        Args:
            violation: candidate
            context: snapshot facts ('components', 'barrier_alive')
        """
        if context.get('components', 1) == 0:
            return False
        if violation.law.startswith('sturm:'):
            return context.get('barrier_alive', True)
        return True

    @classmethod
    def clean(cls, violations: List[Violation], slack: float = 0.0) -> List[Violation]:
        return cls.apply_slack(cls.remove_duplicates(violations), slack)
