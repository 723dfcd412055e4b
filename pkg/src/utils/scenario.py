"""
Scenario definition and loading.

A scenario is one JSON document mirroring the Scenario dataclass with snake_case keys.
Every section is optional and falls back to its defaults; unknown keys are rejected
at every depth with the JSON path of the offending key.
"""

import json
import logging
from dataclasses import MISSING, dataclass, field, fields, is_dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .control import PidGains, SpeedRefs
from .dynamics import KinematicParams
from .mission import MissionConfig
from .power import BatteryModel, ChargerConfig, LoadLedger
from .sensors import AccelConfig, PresetValues
from .world import ArrayLayout, PanelSpec

logger = logging.getLogger(__name__)

MAX_SEED = 2 ** 64


class ScenarioError(ValueError):
    """Invalid scenario document."""


@dataclass(frozen=True)
class CleaningConfig:
    cell_size_m: float = 0.02
    efficiency: float = 0.8
    brush_width_m: float = 0.25
    head_front_m: float = 0.12
    head_rear_m: float = 0.05
    clean_threshold: float = 0.1

    def __post_init__(self):
        if not self.cell_size_m > 0 or not self.brush_width_m > 0:
            raise ValueError("cell_size_m and brush_width_m must be positive")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError(f"efficiency must lie in (0, 1], got {self.efficiency}")
        if self.head_front_m < 0 or self.head_rear_m < 0:
            raise ValueError("head_front_m and head_rear_m must be >= 0")
        if not 0.0 <= self.clean_threshold < 1.0:
            raise ValueError(f"clean_threshold must lie in [0, 1), got {self.clean_threshold}")


@dataclass(frozen=True)
class UltrasonicConfig:
    mount_height_in: float = 2.0
    lookahead_m: float = 0.10
    max_range_in: float = 100.0

    def __post_init__(self):
        if self.mount_height_in < 0 or self.lookahead_m < 0 or not self.max_range_in > 0:
            raise ValueError("ultrasonic mount height and lookahead must be >= 0, max range positive")


@dataclass(frozen=True)
class FaultConfig:
    force_low_battery_at_column: Optional[int] = None

    def __post_init__(self):
        col = self.force_low_battery_at_column
        if col is not None and col < 1:
            raise ValueError(f"force_low_battery_at_column must be >= 1, got {col}")


@dataclass(frozen=True)
class Scenario:
    layout: ArrayLayout = field(default_factory=ArrayLayout)
    kinematics: KinematicParams = field(default_factory=KinematicParams)
    accel_cfg: AccelConfig = field(default_factory=AccelConfig)
    presets: Optional[PresetValues] = None
    gains: PidGains = field(default_factory=PidGains)
    turn_gains: PidGains = field(default_factory=lambda: PidGains(kp=4.0, ki=0.0, kd=2.0))
    refs: SpeedRefs = field(default_factory=SpeedRefs)
    mission_cfg: MissionConfig = field(default_factory=MissionConfig)
    battery: BatteryModel = field(default_factory=BatteryModel)
    charger: ChargerConfig = field(default_factory=ChargerConfig)
    loads: LoadLedger = field(default_factory=LoadLedger)
    cleaning: CleaningConfig = field(default_factory=CleaningConfig)
    ultrasonic: UltrasonicConfig = field(default_factory=UltrasonicConfig)
    faults: FaultConfig = field(default_factory=FaultConfig)
    calibrate_speed_band: bool = True
    dt_s: float = 0.02
    max_sim_s: float = 400.0
    seed: int = 0

    def __post_init__(self):
        if not self.dt_s > 0:
            raise ValueError(f"dt_s must be positive, got {self.dt_s}")
        if not self.max_sim_s > 0:
            raise ValueError(f"max_sim_s must be positive, got {self.max_sim_s}")
        if not 0 <= self.seed < MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if abs(self.charger.v_cv - self.battery.v_full) > 1e-9:
            raise ValueError("charger.v_cv must equal battery.v_full")


# sections that nest another dataclass, keyed by (owner, field name)
_NESTED = {
    (Scenario, "layout"): ArrayLayout,
    (Scenario, "kinematics"): KinematicParams,
    (Scenario, "accel_cfg"): AccelConfig,
    (Scenario, "presets"): PresetValues,
    (Scenario, "gains"): PidGains,
    (Scenario, "turn_gains"): PidGains,
    (Scenario, "refs"): SpeedRefs,
    (Scenario, "mission_cfg"): MissionConfig,
    (Scenario, "battery"): BatteryModel,
    (Scenario, "charger"): ChargerConfig,
    (Scenario, "loads"): LoadLedger,
    (Scenario, "cleaning"): CleaningConfig,
    (Scenario, "ultrasonic"): UltrasonicConfig,
    (Scenario, "faults"): FaultConfig,
}

# integer-valued fields; everything else numeric accepts int or float
_INT_FIELDS = {
    "seed", "adc_full_scale", "n_samples", "cliff_debounce", "lateral_step_count",
    "ref_up", "ref_down", "ref_turn", "ref_lateral", "force_low_battery_at_column",
    "x1_set_up", "x1_set_down", "x1_set_turn", "y1_set_turn", "y1_set_lateral",
    "ascend_polarity", "descend_polarity", "lateral_polarity",
}


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _scalar(name: str, value: Any, default: Any, path: str) -> Any:
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ScenarioError(f"{path}: expected true/false, got {value!r}")
        return value
    if name in _INT_FIELDS:
        if value is None and default is None:
            return None
        if not isinstance(value, int) or isinstance(value, bool):
            raise ScenarioError(f"{path}: expected an integer, got {value!r}")
        return value
    if not _is_number(value):
        raise ScenarioError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _build(cls, data: Any, path: str):
    if not isinstance(data, dict):
        raise ScenarioError(f"{path or 'scenario'}: expected an object, got {type(data).__name__}")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ScenarioError(f"unknown key '{_join(path, unknown[0])}'")

    try:
        defaults = cls()
    except TypeError:
        defaults = None
    kwargs: Dict[str, Any] = {}
    for key, value in data.items():
        key_path = _join(path, key)
        nested = _NESTED.get((cls, key))
        if nested is not None:
            kwargs[key] = None if value is None and key == "presets" else _build(nested, value, key_path)
        elif cls is ArrayLayout and key == "panels":
            if not isinstance(value, list):
                raise ScenarioError(f"{key_path}: expected a list of panels")
            kwargs[key] = tuple(
                _build(PanelSpec, item, f"{key_path}[{i}]") for i, item in enumerate(value)
            )
        elif cls is ArrayLayout and key == "extra_bump_y_m":
            if not isinstance(value, list) or not all(_is_number(v) for v in value):
                raise ScenarioError(f"{key_path}: expected a list of numbers")
            kwargs[key] = tuple(float(v) for v in value)
        else:
            default = known[key].default if defaults is None else getattr(defaults, key)
            if default is MISSING:
                default = None
            kwargs[key] = _scalar(key, value, default, key_path)

    try:
        if defaults is None:
            return cls(**kwargs)
        return replace(defaults, **kwargs)
    except TypeError as exc:
        raise ScenarioError(f"{path or 'scenario'}: missing required key ({exc})") from exc
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"{path or 'scenario'}: {exc}") from exc


def scenario_from_dict(data: Dict[str, Any]) -> Scenario:
    """Build a validated Scenario from a parsed JSON document."""
    return _build(Scenario, data, "")


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Read a scenario JSON file.

    Raises:
        OSError: the file cannot be read
        ScenarioError: the document is not valid JSON or not a valid scenario
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON: {exc}") from exc
    scenario = scenario_from_dict(data)
    logger.info(
        f"Loaded scenario {path}: {len(scenario.layout.panels)} panel(s), seed {scenario.seed}, "
        f"dt {scenario.dt_s:.3f} s, max {scenario.max_sim_s:.0f} s"
    )
    return scenario


def to_plain(value: Any) -> Any:
    """Dataclasses, enums and tuples to JSON-ready values."""
    if is_dataclass(value):
        return {f.name: to_plain(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    return value
