"""
Flow Engine Module
Forced curve-shortening evolution of profile components with surgery at necks
"""
from .config import FlowConfig
from .events import EventKind, EventProcessor, FlowEvent
from .state import FlowState, FlowStatus, FlowTrace, refined_max
from .kinematics import graph_rate, node_velocities, normal_speeds, stable_time_step, velocity
from .engine import DT_FLOOR, FlowEngine, evolve, handle_pinch, step
from .tracker import ComponentTracker

__all__ = [
    'FlowConfig', 'EventKind', 'EventProcessor', 'FlowEvent',
    'FlowState', 'FlowStatus', 'FlowTrace', 'refined_max',
    'velocity', 'graph_rate', 'node_velocities', 'normal_speeds', 'stable_time_step',
    'DT_FLOOR', 'FlowEngine', 'step', 'handle_pinch', 'evolve',
    'ComponentTracker',
]
