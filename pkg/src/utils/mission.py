"""
Coverage mission state machine.

The robot sweeps the array in up/down columns one nozzle width apart. After every
down column it checks the battery; a low battery sends it back to the dock, and
after charging it replays the dock distance and resumes at the same column.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

logger = logging.getLogger(__name__)

HEADING_UP = math.pi / 2.0
HEADING_DOWN = -math.pi / 2.0
HEADING_EAST = 0.0
HEADING_WEST = math.pi
TIME_EPS = 1e-9


class MissionState(Enum):
    ASCEND = "Ascend"
    REVERSE_TOP = "ReverseTop"
    TURN_AT_TOP = "TurnAtTop"
    LATERAL_TOP = "LateralTop"
    TURN_TO_DESCEND = "TurnToDescend"
    DESCEND = "Descend"
    REVERSE_BOTTOM = "ReverseBottom"
    BATTERY_CHECK = "BatteryCheck"
    TURN_AT_BOTTOM = "TurnAtBottom"
    LATERAL_BOTTOM = "LateralBottom"
    TURN_TO_ASCEND = "TurnToAscend"
    TRANSIT_TO_DOCK = "TransitToDock"
    DOCKING = "Docking"
    CHARGING = "Charging"
    RESUME_TRANSIT = "ResumeTransit"
    IDLE = "Idle"


class TransitStage(Enum):
    TURN = "turn"
    DRIVE = "drive"
    TURN_UP = "turn_up"


class Behavior(Enum):
    ASCEND = "ascend"
    DESCEND = "descend"
    LATERAL = "lateral"
    TURN = "turn"
    REVERSE = "reverse"
    STOP = "stop"
    CHARGE = "charge"


class ReverseSense(Enum):
    DOWN_SLOPE = "down"
    UP_SLOPE = "up"


@dataclass(frozen=True)
class BehaviorDirective:
    """What the controller should do this tick. heading is the turn target or lateral facing."""

    behavior: Behavior
    heading: Optional[float] = None
    reverse: Optional[ReverseSense] = None
    vacuum_on: bool = False


@dataclass(frozen=True)
class MissionConfig:
    nozzle_width_m: float = 0.10
    cliff_debounce: int = 20
    lateral_step_count: int = 10
    lateral_tick_s: float = 0.5
    low_battery_v: float = 10.5
    reverse_duration_s: float = 1.0
    dock_tolerance_m: float = 0.05
    cliff_threshold_in: float = 4.0
    # an edge met further than this from east is the bottom edge, not the end of the array
    edge_heading_tol_rad: float = 0.35

    def __post_init__(self):
        for name in (
            "nozzle_width_m", "lateral_tick_s", "low_battery_v", "reverse_duration_s",
            "dock_tolerance_m", "cliff_threshold_in", "edge_heading_tol_rad",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.cliff_debounce < 1:
            raise ValueError(f"cliff_debounce must be >= 1, got {self.cliff_debounce}")
        if self.lateral_step_count < 1:
            raise ValueError(f"lateral_step_count must be >= 1, got {self.lateral_step_count}")


@dataclass(frozen=True)
class MissionMemory:
    column_index: int = 0
    distance_from_dock: int = 0
    battery_was_low: bool = False
    cliff_streak: int = 0
    phase_elapsed_s: float = 0.0
    lateral_elapsed_s: float = 0.0
    lateral_progress_m: float = 0.0
    transit_stage: TransitStage = TransitStage.TURN
    array_complete: bool = False


@dataclass(frozen=True)
class MissionInputs:
    cliff: bool = False
    turn_done: bool = False
    battery_low: bool = False
    charge_complete: bool = False
    at_dock: bool = False
    lateral_progress_m: float = 0.0
    on_panel: bool = True
    dt_s: float = 0.02
    heading_rad: Optional[float] = None


StepResult = Tuple[MissionState, MissionMemory, BehaviorDirective]

_STOP = BehaviorDirective(Behavior.STOP)
_CHARGE = BehaviorDirective(Behavior.CHARGE)


def _turn(heading: float) -> BehaviorDirective:
    return BehaviorDirective(Behavior.TURN, heading=heading)


def _lateral(heading: float, cleaning: bool) -> BehaviorDirective:
    return BehaviorDirective(Behavior.LATERAL, heading=heading, vacuum_on=cleaning)


def _reverse(sense: ReverseSense) -> BehaviorDirective:
    return BehaviorDirective(Behavior.REVERSE, reverse=sense)


_ASCEND = BehaviorDirective(Behavior.ASCEND, heading=HEADING_UP, vacuum_on=True)
_DESCEND = BehaviorDirective(Behavior.DESCEND, heading=HEADING_DOWN, vacuum_on=True)
_BRAKE_CLEANING = BehaviorDirective(Behavior.STOP, vacuum_on=True)


def _enter(mem: MissionMemory, **changes) -> MissionMemory:
    """Memory for a fresh phase: timers, lateral progress and the cliff streak restart."""
    return replace(
        mem,
        phase_elapsed_s=0.0,
        lateral_elapsed_s=0.0,
        lateral_progress_m=0.0,
        cliff_streak=0,
        **changes,
    )


def debounce_cliff(mem: MissionMemory, cliff: bool, cfg: MissionConfig) -> Tuple[bool, MissionMemory]:
    """
    Count consecutive cliff readings.

    Returns:
        (confirmed, new memory); confirmed once the streak exceeds cliff_debounce,
        which also clears the streak
    """
    streak = mem.cliff_streak + 1 if cliff else 0
    if streak > cfg.cliff_debounce:
        return True, replace(mem, cliff_streak=0)
    return False, replace(mem, cliff_streak=streak)


def lateral_budget(mem: MissionMemory, cfg: MissionConfig) -> int:
    """Lateral ticks left in the current lateral phase; 0 once a nozzle width is covered."""
    if mem.lateral_progress_m >= cfg.nozzle_width_m:
        return 0
    used = int(math.floor(mem.lateral_elapsed_s / cfg.lateral_tick_s + TIME_EPS))
    return max(0, cfg.lateral_step_count - used)


def _sweep(
    mem: MissionMemory,
    inputs: MissionInputs,
    cfg: MissionConfig,
    state: MissionState,
    driving: BehaviorDirective,
    on_edge: Callable[[MissionMemory], StepResult],
) -> StepResult:
    confirmed, m = debounce_cliff(mem, inputs.cliff, cfg)
    if confirmed:
        return on_edge(m)
    if inputs.cliff:
        return state, m, _BRAKE_CLEANING
    return state, m, driving


def _reverse_phase(
    mem: MissionMemory,
    inputs: MissionInputs,
    cfg: MissionConfig,
    state: MissionState,
    sense: ReverseSense,
    on_done: Callable[[MissionMemory], StepResult],
) -> StepResult:
    elapsed = mem.phase_elapsed_s + inputs.dt_s
    if elapsed >= cfg.reverse_duration_s - TIME_EPS:
        return on_done(mem)
    return state, replace(mem, phase_elapsed_s=elapsed), _reverse(sense)


def _lateral_phase(
    mem: MissionMemory,
    inputs: MissionInputs,
    cfg: MissionConfig,
    state: MissionState,
    on_edge: Callable[[MissionMemory], StepResult],
    on_budget: Callable[[MissionMemory], StepResult],
) -> StepResult:
    m = replace(
        mem,
        lateral_progress_m=inputs.lateral_progress_m,
        lateral_elapsed_s=mem.lateral_elapsed_s + (inputs.dt_s if inputs.on_panel else 0.0),
    )
    confirmed, m = debounce_cliff(m, inputs.cliff, cfg)
    if confirmed:
        return on_edge(m)
    if lateral_budget(m, cfg) == 0:
        return on_budget(m)
    if inputs.cliff:
        return state, m, _BRAKE_CLEANING
    return state, m, _lateral(HEADING_EAST, True)


def _await_turn(
    mem: MissionMemory,
    inputs: MissionInputs,
    state: MissionState,
    heading: float,
    on_done: Callable[[MissionMemory], StepResult],
) -> StepResult:
    if inputs.turn_done:
        return on_done(mem)
    return state, mem, _turn(heading)


# entry helpers: each returns the state entered and its first directive

def _to_ascend(m: MissionMemory) -> StepResult:
    return MissionState.ASCEND, _enter(m), _ASCEND


def _to_descend(m: MissionMemory) -> StepResult:
    return MissionState.DESCEND, _enter(m), _DESCEND


def _to_transit(m: MissionMemory, **changes) -> StepResult:
    return (
        MissionState.TRANSIT_TO_DOCK,
        _enter(m, transit_stage=TransitStage.TURN, **changes),
        _turn(HEADING_WEST),
    )


def _step_ascend(mem, inputs, cfg):
    return _sweep(
        mem, inputs, cfg, MissionState.ASCEND, _ASCEND,
        lambda m: (MissionState.REVERSE_TOP, _enter(m), _reverse(ReverseSense.DOWN_SLOPE)),
    )


def _step_reverse_top(mem, inputs, cfg):
    return _reverse_phase(
        mem, inputs, cfg, MissionState.REVERSE_TOP, ReverseSense.DOWN_SLOPE,
        lambda m: (MissionState.TURN_AT_TOP, _enter(m), _turn(HEADING_EAST)),
    )


def _step_turn_at_top(mem, inputs, cfg):
    return _await_turn(
        mem, inputs, MissionState.TURN_AT_TOP, HEADING_EAST,
        lambda m: (MissionState.LATERAL_TOP, _enter(m), _lateral(HEADING_EAST, True)),
    )


def _step_lateral_top(mem, inputs, cfg):
    def done(m):
        return MissionState.TURN_TO_DESCEND, _enter(m), _turn(HEADING_DOWN)

    return _lateral_phase(mem, inputs, cfg, MissionState.LATERAL_TOP, done, done)


def _step_turn_to_descend(mem, inputs, cfg):
    return _await_turn(mem, inputs, MissionState.TURN_TO_DESCEND, HEADING_DOWN, _to_descend)


def _step_descend(mem, inputs, cfg):
    return _sweep(
        mem, inputs, cfg, MissionState.DESCEND, _DESCEND,
        lambda m: (MissionState.REVERSE_BOTTOM, _enter(m), _reverse(ReverseSense.UP_SLOPE)),
    )


def _step_reverse_bottom(mem, inputs, cfg):
    return _reverse_phase(
        mem, inputs, cfg, MissionState.REVERSE_BOTTOM, ReverseSense.UP_SLOPE,
        lambda m: (
            MissionState.BATTERY_CHECK,
            _enter(m, column_index=m.column_index + 1),
            _STOP,
        ),
    )


def _step_battery_check(mem, inputs, cfg):
    if inputs.battery_low:
        logger.info(f"Battery low after column {mem.column_index}, returning to dock")
        return _to_transit(mem, battery_was_low=True)
    return MissionState.TURN_AT_BOTTOM, _enter(mem), _turn(HEADING_EAST)


def _step_turn_at_bottom(mem, inputs, cfg):
    return _await_turn(
        mem, inputs, MissionState.TURN_AT_BOTTOM, HEADING_EAST,
        lambda m: (MissionState.LATERAL_BOTTOM, _enter(m), _lateral(HEADING_EAST, True)),
    )


def _off_east(heading: Optional[float], cfg: MissionConfig) -> bool:
    if heading is None:
        return False
    return abs(math.remainder(heading - HEADING_EAST, 2.0 * math.pi)) > cfg.edge_heading_tol_rad


def _step_lateral_bottom(mem, inputs, cfg):
    def array_end(m):
        if _off_east(inputs.heading_rad, cfg):
            logger.warning(
                f"Edge met at heading {inputs.heading_rad:.3f} rad during column {m.column_index}, "
                "realigning east"
            )
            return MissionState.TURN_AT_BOTTOM, _enter(m), _turn(HEADING_EAST)
        logger.info(f"End of array reached after {m.column_index} columns")
        return _to_transit(m, array_complete=True)

    def next_column(m):
        return MissionState.TURN_TO_ASCEND, _enter(m), _turn(HEADING_UP)

    return _lateral_phase(mem, inputs, cfg, MissionState.LATERAL_BOTTOM, array_end, next_column)


def _step_turn_to_ascend(mem, inputs, cfg):
    return _await_turn(mem, inputs, MissionState.TURN_TO_ASCEND, HEADING_UP, _to_ascend)


def _step_transit(mem, inputs, cfg):
    state = MissionState.TRANSIT_TO_DOCK
    if mem.transit_stage is TransitStage.TURN:
        if not inputs.turn_done:
            return state, mem, _turn(HEADING_WEST)
        m = replace(mem, transit_stage=TransitStage.DRIVE, distance_from_dock=mem.distance_from_dock + 1)
        return state, m, _lateral(HEADING_WEST, False)
    if inputs.at_dock:
        return MissionState.DOCKING, _enter(mem), _STOP
    m = replace(mem, distance_from_dock=mem.distance_from_dock + 1)
    return state, m, _lateral(HEADING_WEST, False)


def _step_docking(mem, inputs, cfg):
    logger.info(f"Docked after {mem.distance_from_dock} transit ticks")
    return MissionState.CHARGING, _enter(mem), _CHARGE


def _step_charging(mem, inputs, cfg):
    if not inputs.charge_complete:
        return MissionState.CHARGING, mem, _CHARGE
    if mem.battery_was_low and not mem.array_complete:
        logger.info(
            f"Charge complete, resuming column {mem.column_index} "
            f"({mem.distance_from_dock} ticks from dock)"
        )
        m = _enter(mem, battery_was_low=False, transit_stage=TransitStage.TURN)
        return MissionState.RESUME_TRANSIT, m, _turn(HEADING_EAST)
    return MissionState.IDLE, _enter(mem, battery_was_low=False), _STOP


def _replay_or_turn_up(mem: MissionMemory) -> StepResult:
    state = MissionState.RESUME_TRANSIT
    if mem.distance_from_dock > 0:
        m = replace(mem, transit_stage=TransitStage.DRIVE, distance_from_dock=mem.distance_from_dock - 1)
        return state, m, _lateral(HEADING_EAST, False)
    return state, replace(mem, transit_stage=TransitStage.TURN_UP), _turn(HEADING_UP)


def _step_resume(mem, inputs, cfg):
    state = MissionState.RESUME_TRANSIT
    if mem.transit_stage is TransitStage.TURN:
        if not inputs.turn_done:
            return state, mem, _turn(HEADING_EAST)
        return _replay_or_turn_up(mem)
    if mem.transit_stage is TransitStage.DRIVE:
        return _replay_or_turn_up(mem)
    if inputs.turn_done:
        return _to_ascend(replace(mem, transit_stage=TransitStage.TURN))
    return state, mem, _turn(HEADING_UP)


def _step_idle(mem, inputs, cfg):
    return MissionState.IDLE, mem, _STOP


_HANDLERS: Dict[MissionState, Callable[[MissionMemory, MissionInputs, MissionConfig], StepResult]] = {
    MissionState.ASCEND: _step_ascend,
    MissionState.REVERSE_TOP: _step_reverse_top,
    MissionState.TURN_AT_TOP: _step_turn_at_top,
    MissionState.LATERAL_TOP: _step_lateral_top,
    MissionState.TURN_TO_DESCEND: _step_turn_to_descend,
    MissionState.DESCEND: _step_descend,
    MissionState.REVERSE_BOTTOM: _step_reverse_bottom,
    MissionState.BATTERY_CHECK: _step_battery_check,
    MissionState.TURN_AT_BOTTOM: _step_turn_at_bottom,
    MissionState.LATERAL_BOTTOM: _step_lateral_bottom,
    MissionState.TURN_TO_ASCEND: _step_turn_to_ascend,
    MissionState.TRANSIT_TO_DOCK: _step_transit,
    MissionState.DOCKING: _step_docking,
    MissionState.CHARGING: _step_charging,
    MissionState.RESUME_TRANSIT: _step_resume,
    MissionState.IDLE: _step_idle,
}


def mission_step(
    state: MissionState,
    mem: MissionMemory,
    inputs: MissionInputs,
    cfg: MissionConfig,
) -> StepResult:
    """
    Advance the mission by one tick.

    Args:
        state: Current state
        mem: Mission memory
        inputs: Instantaneous detector outputs and engine measurements
        cfg: Mission configuration

    Returns:
        (next state, new memory, directive for this tick)
    """
    try:
        handler = _HANDLERS[state]
    except (KeyError, TypeError):
        raise ValueError(f"unknown mission state: {state!r}") from None
    next_state, new_mem, directive = handler(mem, inputs, cfg)
    if next_state is not state:
        logger.debug(f"Mission {state.value} -> {next_state.value} (column {new_mem.column_index})")
    return next_state, new_mem, directive
