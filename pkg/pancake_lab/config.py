"""
Run Configuration
One validated record for every command, with presets and a stable hash
"""
import hashlib
import json
import os
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from pancake_lab.errors import ConfigError, ConstructionError
from pancake_lab.flow_engine import FlowConfig
from pancake_lab.pancake_model import CapStyle, GirthLaw, NeckGeometry, PancakeSpec, dumbbell_geometry
from pancake_lab.pancake_model.pancake import DESK_GIRTH_OFFSET, width_asymptotic

load_dotenv()

DESK_SCHEDULE = [-5.0, -10.0, -20.0, -40.0]
DUMBBELL_NECK = 0.2


class ProfileKind(str, Enum):
    STACKED = 'stacked'
    SPHERE = 'sphere'
    CYLINDER = 'cylinder'
    DUMBBELL = 'dumbbell'


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')


class PancakeSettings(_Section):
    """Pancake building block and the gluing around it"""
    width: Optional[float] = Field(None, gt=0)
    c_n: float = 0.0
    cap_style: CapStyle = CapStyle.SEMICIRCLE
    girth_law: GirthLaw = GirthLaw.DESK
    girth_offset: float = DESK_GIRTH_OFFSET
    gap_half: float = Field(1.0, gt=0)
    check_monotone: bool = True

    def slab_width(self, n: int) -> float:
        return width_asymptotic(n) if self.width is None else self.width

    def spec(self, s: float, n: int) -> PancakeSpec:
        return PancakeSpec.from_schedule(
            s, n=n, width=self.slab_width(n), c_n=self.c_n, cap_style=self.cap_style.value,
            girth_law=self.girth_law.value, girth_offset=self.girth_offset,
        )


class ProfileSettings(_Section):
    """
    Initial data of `gen` and `evolve`.

    Args:
        kind: stacked | sphere | cylinder | dumbbell
        s: construction time of the stacked profile
        m: neck minimum (stacked, dumbbell)
        rho: carve height (stacked, instead of m)
        radius: sphere/dumbbell radius or cylinder height
        half_length: cylinder half-length
    """
    kind: ProfileKind = ProfileKind.STACKED
    s: float = Field(-5.0, lt=0)
    m: Optional[float] = None
    rho: Optional[float] = None
    radius: float = Field(1.0, gt=0)
    half_length: float = Field(5.0, gt=0)

    @property
    def dumbbell_m(self) -> float:
        return DUMBBELL_NECK if self.m is None else self.m


class ShootSettings(_Section):
    """
    Bisection and old-flow parameters.

    Args:
        schedule: construction times s_i, most recent first
        threshold: M at which flows are classified (None: threshold_factor x width)
        tol_fraction: bisection tolerance as a fraction of the girth
        delta_factor: margin above m* in units of the tolerance
        m_lo_fraction / m_hi_fraction: initial bracket as fractions of the girth
        band: admissible neck values in units of band_unit (None: pinch_eps)
        probes: extra equally spaced classifications for the monotonicity check
    """
    schedule: List[float] = Field(default_factory=lambda: list(DESK_SCHEDULE))
    threshold: Optional[float] = Field(None, gt=0)
    threshold_factor: float = Field(2.0, gt=0)
    tol_fraction: float = Field(1e-3, gt=0, lt=1)
    delta_factor: float = Field(4.0, gt=0)
    m_lo_fraction: float = Field(0.0025, gt=0, lt=1)
    m_hi_fraction: float = Field(0.9, gt=0, lt=1)
    max_iterations: int = Field(80, ge=1)
    band: Tuple[float, float] = (1.0, 100.0)
    band_unit: Optional[float] = Field(None, gt=0)
    probes: int = Field(0, ge=0)
    stop_on_pinch: bool = True

    @field_validator('schedule')
    @classmethod
    def _negative_times(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("schedule must not be empty")
        if any(s >= 0 for s in value):
            raise ValueError("construction times must be negative")
        return value

    @model_validator(mode='after')
    def _ordered(self) -> "ShootSettings":
        if not self.band[0] < self.band[1]:
            raise ValueError(f"band lo must be below hi, got {self.band}")
        if not self.m_lo_fraction < self.m_hi_fraction:
            raise ValueError("m_lo_fraction must be below m_hi_fraction")
        return self


class DiagnosticsSettings(_Section):
    c_fractions: List[float] = Field(default_factory=lambda: [0.25, 0.5])
    rate_slack: float = Field(0.1, ge=0)
    catenoid_ratio: float = Field(0.4, gt=0)

    @field_validator('c_fractions')
    @classmethod
    def _fractions(cls, value: List[float]) -> List[float]:
        if any(not 0 < c < 1 for c in value):
            raise ValueError("c fractions must lie in (0, 1)")
        return value


class RunConfig(_Section):
    """Everything a command needs; unknown keys are rejected"""
    flow: FlowConfig = Field(default_factory=FlowConfig)
    pancake: PancakeSettings = Field(default_factory=PancakeSettings)
    profile: ProfileSettings = Field(default_factory=ProfileSettings)
    shoot: ShootSettings = Field(default_factory=ShootSettings)
    diagnostics: DiagnosticsSettings = Field(default_factory=DiagnosticsSettings)
    output_dir: str = 'runs'

    @model_validator(mode='after')
    def _consistent(self) -> "RunConfig":
        try:
            return self._check_girths()
        except ConstructionError as exc:
            raise ValueError(str(exc)) from exc

    def _check_girths(self) -> "RunConfig":
        threshold = self.threshold()
        for s in self.shoot.schedule:
            girth = self.pancake_spec(s).girth_g
            if not threshold < girth:
                raise ValueError(f"threshold {threshold:.6g} must be below the girth {girth:.6g} at s={s}")
        geometry = self.neck_geometry()
        if geometry is not None:
            p = self.profile
            if p.kind is ProfileKind.DUMBBELL:
                geometry.check(m=p.dumbbell_m)
            else:
                geometry.check(m=p.m, rho=p.rho)
        return self

    def neck_geometry(self) -> Optional[NeckGeometry]:
        """Carving geometry of the configured necked profile, None for other kinds"""
        p = self.profile
        if p.kind is ProfileKind.DUMBBELL:
            return dumbbell_geometry(p.radius, self.pancake.gap_half)
        if p.kind is ProfileKind.STACKED and (p.m is not None or p.rho is not None):
            return NeckGeometry.from_pancake(self.pancake_spec(p.s), self.pancake.gap_half)
        return None

    @property
    def n(self) -> int:
        return self.flow.n

    @property
    def slab_width(self) -> float:
        return self.pancake.slab_width(self.n)

    def pancake_spec(self, s: float) -> PancakeSpec:
        return self.pancake.spec(s, self.n)

    def threshold(self) -> float:
        shoot = self.shoot
        return shoot.threshold if shoot.threshold is not None else shoot.threshold_factor * self.slab_width

    def band(self) -> Tuple[float, float]:
        unit = self.shoot.band_unit if self.shoot.band_unit is not None else self.flow.pinch_eps
        lo, hi = self.shoot.band
        return lo * unit, hi * unit

    def canonical_json(self) -> str:
        return canonical_json(self)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode('utf-8')).hexdigest()


def canonical_json(config: BaseModel) -> str:
    """Sorted keys, no whitespace, repr-exact floats"""
    return json.dumps(config.model_dump(mode='json'), sort_keys=True, separators=(',', ':'))


def load_config(path: Union[str, Path], **overrides) -> RunConfig:
    """
    Read a JSON config.

    Raises:
        ConfigError: missing file, malformed JSON or a validation failure
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config not found: {path}")
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    data.update(overrides)
    return validated(data)


def validated(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


# ==================== PRESETS ====================

PRESETS = {
    'sphere': {
        'flow': {'spacing': 0.02, 'pinch_eps': 0.08, 'tip_eps': 0.08, 'max_time': 0.25,
                 'snapshot_stride': 0.01},
        'profile': {'kind': 'sphere', 'radius': 1.0},
    },
    'cylinder': {
        'flow': {'spacing': 0.1, 'pinch_eps': 0.4, 'tip_eps': 0.4, 'max_time': 5.0,
                 'snapshot_stride': 0.25},
        'profile': {'kind': 'cylinder', 'radius': 10.0, 'half_length': 5.0},
    },
    'dumbbell': {
        'flow': {'spacing': 0.025, 'pinch_eps': 0.1, 'tip_eps': 0.1, 'max_time': 6.0,
                 'snapshot_stride': 0.1},
        'profile': {'kind': 'dumbbell', 'radius': 3.0, 'm': 0.2},
    },
    'stack-desk': {
        'flow': {'spacing': 0.2, 'pinch_eps': 0.8, 'tip_eps': 0.8, 'max_time': 60.0,
                 'snapshot_stride': 0.5},
        'profile': {'kind': 'stacked', 's': -5.0, 'm': 1.0},
        'shoot': {'schedule': list(DESK_SCHEDULE)},
    },
}


def preset(name: str, **overrides) -> RunConfig:
    """Named starting configuration; top-level sections in overrides replace the preset's"""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset '{name}' (choose from {', '.join(sorted(PRESETS))})")
    data = json.loads(json.dumps(PRESETS[name]))
    data.update(overrides)
    return validated(data)


def thread_count(default: int = 1) -> int:
    """Fan-out cap from PANCAKE_THREADS"""
    raw = os.getenv('PANCAKE_THREADS')
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"PANCAKE_THREADS must be an integer, got '{raw}'") from exc
    return max(value, 1)


def _seed_like(name: str) -> bool:
    name = name.lower()
    return 'seed' in name or 'rng' in name or 'random' in name


def seed_sources(config: RunConfig) -> List[str]:
    """Config fields and PANCAKE_* variables that would configure random state"""
    found = []

    def walk(data, prefix):
        for key, value in data.items():
            path = f"{prefix}{key}"
            if _seed_like(key):
                found.append(path)
            if isinstance(value, dict):
                walk(value, f"{path}.")

    walk(config.model_dump(mode='json'), '')
    found += sorted(k for k in os.environ if k.startswith('PANCAKE_') and _seed_like(k))
    return found


def check_seedless(config: RunConfig) -> None:
    """
    Raises:
        ConfigError: some random state is configured
    """
    sources = seed_sources(config)
    if sources:
        raise ConfigError(f"seedless run, but random state is configured by {', '.join(sources)}")
