"""
Error hierarchy shared by every sub-package.
"""
from typing import Any, Optional


class PancakeLabError(Exception):
    """Base class for all library errors"""


class CurveError(PancakeLabError):
    """A curve violates a representation invariant or an operation precondition"""


class ConstructionError(PancakeLabError):
    """Pancake or neck-join geometry could not be built"""

    def __init__(self, message: str, event: Optional[Any] = None):
        super().__init__(message)
        self.event = event


class FlowError(PancakeLabError):
    """
    The evolution blew up.

    Carries the last good state, the offending node and, once the engine has
    wrapped it, the partial trace.
    """

    def __init__(self, message: str, state: Optional[Any] = None,
                 node: Optional[tuple] = None, trace: Optional[Any] = None):
        super().__init__(message)
        self.state = state
        self.node = node
        self.trace = trace


class BarrierError(PancakeLabError):
    """Barrier construction failed or a configuration is not a barrier configuration"""


class ShootError(PancakeLabError):
    """Bisection/shooting failure; witnesses are attached when available"""

    def __init__(self, message: str, witnesses: Optional[tuple] = None,
                 samples: Optional[list] = None):
        super().__init__(message)
        self.witnesses = witnesses
        self.samples = samples


class DiagnosticsError(PancakeLabError):
    """A law check was requested outside its hypotheses"""


class ConfigError(PancakeLabError):
    """Run configuration failed validation"""
