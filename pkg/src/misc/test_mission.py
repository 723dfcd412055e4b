"""
Tests for the coverage state machine, cliff debouncing and dock replay.
"""

import math

import pytest

from utils.mission import (
    HEADING_EAST,
    HEADING_UP,
    HEADING_WEST,
    Behavior,
    MissionConfig,
    MissionInputs,
    MissionMemory,
    MissionState,
    TransitStage,
    debounce_cliff,
    lateral_budget,
    mission_step,
)

CFG = MissionConfig()
NO_VACUUM_STATES = {
    MissionState.TRANSIT_TO_DOCK,
    MissionState.DOCKING,
    MissionState.CHARGING,
    MissionState.RESUME_TRANSIT,
    MissionState.IDLE,
}


def step(state, mem, **inputs):
    return mission_step(state, mem, MissionInputs(**inputs), CFG)


def test_debounce_confirms_after_the_threshold():
    mem = MissionMemory()
    for k in range(1, 22):
        confirmed, mem = debounce_cliff(mem, True, CFG)
        assert confirmed == (k == 21)
    assert mem.cliff_streak == 0


def test_debounce_resets_on_clear_reading():
    mem = MissionMemory()
    for _ in range(19):
        confirmed, mem = debounce_cliff(mem, True, CFG)
        assert not confirmed
    confirmed, mem = debounce_cliff(mem, False, CFG)
    assert not confirmed and mem.cliff_streak == 0


def test_debounce_of_one():
    cfg = MissionConfig(cliff_debounce=1)
    confirmed, mem = debounce_cliff(MissionMemory(), True, cfg)
    assert not confirmed
    confirmed, mem = debounce_cliff(mem, True, cfg)
    assert confirmed


def test_descend_reverses_once_the_edge_is_confirmed():
    state, mem, directive = step(MissionState.DESCEND, MissionMemory(cliff_streak=20), cliff=True)
    assert state is MissionState.REVERSE_BOTTOM
    assert directive.behavior is Behavior.REVERSE
    assert mem.cliff_streak == 0


def test_pending_cliff_brakes_without_forward_drive():
    state, mem, directive = step(MissionState.ASCEND, MissionMemory(cliff_streak=3), cliff=True)
    assert state is MissionState.ASCEND
    assert directive.behavior is Behavior.STOP
    assert directive.vacuum_on
    assert mem.cliff_streak == 4


def test_clear_ascend_keeps_cleaning():
    state, mem, directive = step(MissionState.ASCEND, MissionMemory())
    assert state is MissionState.ASCEND
    assert directive.behavior is Behavior.ASCEND and directive.vacuum_on


def test_reverse_lasts_its_duration():
    state, mem = MissionState.REVERSE_TOP, MissionMemory()
    ticks = 0
    while state is MissionState.REVERSE_TOP:
        state, mem, directive = step(state, mem, dt_s=0.02)
        ticks += 1
    assert ticks == 50
    assert state is MissionState.TURN_AT_TOP
    assert directive.behavior is Behavior.TURN and directive.heading == HEADING_EAST


def test_battery_check_sends_a_low_robot_home():
    state, mem, directive = step(MissionState.BATTERY_CHECK, MissionMemory(column_index=2), battery_low=True)
    assert state is MissionState.TRANSIT_TO_DOCK
    assert mem.battery_was_low
    assert directive.behavior is Behavior.TURN and directive.heading == HEADING_WEST


def test_battery_check_continues_when_healthy():
    state, _, directive = step(MissionState.BATTERY_CHECK, MissionMemory(column_index=2))
    assert state is MissionState.TURN_AT_BOTTOM
    assert directive.heading == HEADING_EAST


def test_column_index_counts_down_columns():
    state, mem = MissionState.REVERSE_BOTTOM, MissionMemory(column_index=4)
    while state is MissionState.REVERSE_BOTTOM:
        state, mem, _ = step(state, mem)
    assert state is MissionState.BATTERY_CHECK
    assert mem.column_index == 5


def test_lateral_budget():
    assert lateral_budget(MissionMemory(), CFG) == 10
    assert lateral_budget(MissionMemory(lateral_elapsed_s=5.0), CFG) == 0
    assert lateral_budget(MissionMemory(lateral_elapsed_s=1.2), CFG) == 8
    assert lateral_budget(MissionMemory(lateral_progress_m=0.1), CFG) == 0


def test_lateral_ends_early_on_displacement():
    cfg = MissionConfig(lateral_tick_s=0.02)
    state, mem = MissionState.LATERAL_TOP, MissionMemory()
    for tick in range(1, 11):
        progress = 0.1 if tick == 6 else 0.015 * tick
        state, mem, directive = mission_step(
            state, mem, MissionInputs(lateral_progress_m=progress), cfg
        )
        if state is not MissionState.LATERAL_TOP:
            break
    assert tick == 6
    assert state is MissionState.TURN_TO_DESCEND


def test_lateral_ends_when_the_budget_runs_out():
    cfg = MissionConfig(lateral_tick_s=0.02)
    state, mem = MissionState.LATERAL_TOP, MissionMemory()
    ticks = 0
    while state is MissionState.LATERAL_TOP:
        state, mem, _ = mission_step(state, mem, MissionInputs(lateral_progress_m=0.01), cfg)
        ticks += 1
    assert ticks == 10


def test_lateral_budget_only_counts_on_panel():
    cfg = MissionConfig(lateral_tick_s=0.02)
    state, mem = MissionState.LATERAL_TOP, MissionMemory()
    for _ in range(30):
        state, mem, _ = mission_step(state, mem, MissionInputs(on_panel=False), cfg)
    assert state is MissionState.LATERAL_TOP


def test_lateral_bottom_edge_completes_the_array():
    mem = MissionMemory(column_index=6, cliff_streak=20)
    state, mem, directive = step(MissionState.LATERAL_BOTTOM, mem, cliff=True)
    assert state is MissionState.TRANSIT_TO_DOCK
    assert mem.array_complete and not mem.battery_was_low
    assert not directive.vacuum_on


@pytest.mark.parametrize("heading", [0.0, 0.3, -0.3, 2 * math.pi])
def test_lateral_bottom_edge_facing_east_ends_the_array(heading):
    mem = MissionMemory(column_index=6, cliff_streak=20)
    state, mem, _ = step(MissionState.LATERAL_BOTTOM, mem, cliff=True, heading_rad=heading)
    assert state is MissionState.TRANSIT_TO_DOCK
    assert mem.array_complete


@pytest.mark.parametrize("heading", [-1.7, 1.2, math.pi])
def test_lateral_bottom_edge_off_east_turns_back(heading):
    mem = MissionMemory(column_index=2, cliff_streak=20)
    state, mem, directive = step(MissionState.LATERAL_BOTTOM, mem, cliff=True, heading_rad=heading)
    assert state is MissionState.TURN_AT_BOTTOM
    assert not mem.array_complete
    assert mem.column_index == 2
    assert directive.behavior is Behavior.TURN and directive.heading == HEADING_EAST


def test_transit_counts_ticks_until_the_dock():
    state, mem, _ = step(MissionState.BATTERY_CHECK, MissionMemory(column_index=3), battery_low=True)
    state, mem, directive = step(state, mem)
    assert directive.behavior is Behavior.TURN
    state, mem, directive = step(state, mem, turn_done=True)
    assert directive.behavior is Behavior.LATERAL and directive.heading == HEADING_WEST
    for _ in range(56):
        state, mem, directive = step(state, mem)
        assert directive.behavior is Behavior.LATERAL
    assert mem.distance_from_dock == 57
    state, mem, directive = step(state, mem, at_dock=True)
    assert state is MissionState.DOCKING
    assert mem.distance_from_dock == 57


def test_resume_replays_the_dock_distance():
    mem = MissionMemory(column_index=3, distance_from_dock=57, battery_was_low=True)
    state, mem, directive = step(MissionState.CHARGING, mem, charge_complete=True)
    assert state is MissionState.RESUME_TRANSIT
    assert directive.behavior is Behavior.TURN and directive.heading == HEADING_EAST

    state, mem, directive = step(state, mem, turn_done=True)
    laterals = 0
    while directive.behavior is Behavior.LATERAL:
        assert directive.heading == HEADING_EAST and not directive.vacuum_on
        laterals += 1
        state, mem, directive = step(state, mem)
    assert laterals == 57
    assert mem.distance_from_dock == 0
    assert mem.transit_stage is TransitStage.TURN_UP
    assert directive.behavior is Behavior.TURN and directive.heading == HEADING_UP

    state, mem, directive = step(state, mem, turn_done=True)
    assert state is MissionState.ASCEND
    assert mem.column_index == 3
    assert directive.behavior is Behavior.ASCEND


def test_charging_waits_then_goes_idle_when_done():
    mem = MissionMemory(array_complete=True)
    state, mem, directive = step(MissionState.CHARGING, mem)
    assert state is MissionState.CHARGING and directive.behavior is Behavior.CHARGE
    state, mem, directive = step(state, mem, charge_complete=True)
    assert state is MissionState.IDLE
    state, _, directive = step(state, mem, cliff=True, battery_low=True)
    assert state is MissionState.IDLE and directive.behavior is Behavior.STOP


def test_full_column_cycle():
    state, mem = MissionState.ASCEND, MissionMemory()
    visited = [state]
    cliff_states = {MissionState.ASCEND, MissionState.DESCEND}
    for _ in range(2000):
        inputs = MissionInputs(
            cliff=state in cliff_states,
            turn_done=True,
            lateral_progress_m=0.2,
        )
        state, mem, directive = mission_step(state, mem, inputs, CFG)
        if state is not visited[-1]:
            visited.append(state)
        if state in NO_VACUUM_STATES:
            assert not directive.vacuum_on
        if state is MissionState.ASCEND and len(visited) > 1:
            break
    assert [s.value for s in visited] == [
        "Ascend", "ReverseTop", "TurnAtTop", "LateralTop", "TurnToDescend", "Descend",
        "ReverseBottom", "BatteryCheck", "TurnAtBottom", "LateralBottom", "TurnToAscend", "Ascend",
    ]
    assert mem.column_index == 1


def test_unknown_state_is_rejected():
    with pytest.raises(ValueError):
        mission_step("Hover", MissionMemory(), MissionInputs(), CFG)


def test_config_validation():
    with pytest.raises(ValueError):
        MissionConfig(cliff_debounce=0)
    with pytest.raises(ValueError):
        MissionConfig(nozzle_width_m=0.0)
    with pytest.raises(ValueError):
        MissionConfig(edge_heading_tol_rad=0.0)
