"""
Shared fixtures: coarse flow settings and a miniature stacked configuration
"""
import pytest

from pancake_lab.barriers import round_profile
from pancake_lab.config import validated
from pancake_lab.flow_engine import FlowConfig, FlowEngine
from pancake_lab.pancake_model import PancakeSpec


@pytest.fixture(scope="session")
def unit_sphere_trace():
    """Round sphere of radius 1, n = 3, evolved to extinction"""
    config = FlowConfig.resolved(0.02, n=3, max_time=0.25, snapshot_stride=0.01)
    return FlowEngine(config).evolve(round_profile(0.0, 1.0, config.spacing))


@pytest.fixture(scope="session")
def sphere3_trace():
    """Round sphere of radius 3, n = 3, on [0, 0.3]"""
    config = FlowConfig.resolved(0.05, n=3, max_time=0.3, snapshot_stride=0.05)
    return FlowEngine(config).evolve(round_profile(0.0, 3.0, config.spacing))


@pytest.fixture
def desk_pancake():
    """w = 2*pi, g = 20 at s = -5"""
    return PancakeSpec.from_schedule(-5.0, n=3)


@pytest.fixture
def mini_config():
    """Small glued pancakes (w = 2, g(-5) = 6) that classify in seconds"""
    return validated({
        'flow': {'n': 3, 'spacing': 0.05, 'pinch_eps': 0.2, 'tip_eps': 0.2,
                 'max_time': 10.0, 'snapshot_stride': 0.1},
        'pancake': {'width': 2.0, 'girth_offset': 1.0, 'gap_half': 0.5},
        'profile': {'kind': 'stacked', 's': -5.0},
    })
