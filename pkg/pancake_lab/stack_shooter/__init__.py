"""
Stack Shooter Module
Dichotomy classification, bisection in the neck parameter and old-flow families
"""
from .results import Classification, Label, ShootResult, monotonicity_anomalies
from .shooter import (
    MaxHeightBelow,
    StackShooter,
    bisect,
    build_old_flow,
    classify,
    run_schedule,
    threshold_time,
)
from .study import StudyTable, common_times, convergence_study

__all__ = [
    'Label', 'Classification', 'ShootResult', 'monotonicity_anomalies',
    'MaxHeightBelow', 'StackShooter', 'threshold_time',
    'classify', 'bisect', 'build_old_flow', 'run_schedule',
    'StudyTable', 'common_times', 'convergence_study',
]
