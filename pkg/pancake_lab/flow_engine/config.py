"""
Flow Configuration
Validated parameters of one evolution
"""
from pydantic import BaseModel, ConfigDict, Field, model_validator

# events must be resolvable on the grid
EVENT_RESOLUTION = 4.0


class FlowConfig(BaseModel):
    """
    Discretization and stopping parameters of the forced curve-shortening flow.

    Args:
        n: dimension of the rotated hypersurface (forcing weight n - 1)
        spacing: target arc-length node spacing
        cfl: time-step safety factor in (0, 1)
        pinch_eps: neck height that triggers surgery
        tip_eps: component diameter below which it is removed
        max_time: evolution horizon (duration from the initial time)
        snapshot_stride: time between recorded snapshots
        forcing: include the (n - 1) cos(theta)/r term
    """
    model_config = ConfigDict(frozen=True, extra='forbid')

    n: int = Field(3, ge=2)
    spacing: float = Field(0.05, gt=0)
    cfl: float = Field(0.9, gt=0, lt=1)
    pinch_eps: float = Field(0.2, gt=0)
    tip_eps: float = Field(0.2, gt=0)
    max_time: float = Field(50.0, gt=0)
    snapshot_stride: float = Field(0.5, gt=0)
    forcing: bool = True

    @model_validator(mode='after')
    def _events_resolvable(self) -> "FlowConfig":
        floor = EVENT_RESOLUTION * self.spacing
        if self.pinch_eps < floor * (1 - 1e-12):
            raise ValueError(f"pinch_eps {self.pinch_eps} must be >= {EVENT_RESOLUTION:g} x spacing ({floor})")
        if self.tip_eps < floor * (1 - 1e-12):
            raise ValueError(f"tip_eps {self.tip_eps} must be >= {EVENT_RESOLUTION:g} x spacing ({floor})")
        return self

    @property
    def tip_weight(self) -> int:
        """Multiplier of the cap curvature in the axis-tip speed"""
        return self.n if self.forcing else 1

    @classmethod
    def resolved(cls, spacing: float, **overrides) -> "FlowConfig":
        """Config whose event thresholds sit at the resolution floor for `spacing`"""
        params = dict(spacing=spacing, pinch_eps=EVENT_RESOLUTION * spacing,
                      tip_eps=EVENT_RESOLUTION * spacing)
        params.update(overrides)
        return cls(**params)
