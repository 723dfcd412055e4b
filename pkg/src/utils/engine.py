"""
Deterministic fixed-step simulation of a cleaning run.

Each tick: sense (two accelerometers, the look-down ultrasonic ranger, the battery)
-> reduce -> mission step -> control -> dynamics -> cleaning -> power. All randomness
comes from the scenario seed, split into one stream per accelerometer.
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from tqdm import tqdm

from .control import (
    Axis,
    Mode,
    PidState,
    TurnPlan,
    TurnProgress,
    can_steer,
    heading_command,
    open_loop_command,
    plan_turn,
    reverse_command,
    stop_command,
    timed_turn_command,
    turn_command,
)
from .dynamics import (
    KinematicParams,
    MotorCommand,
    Pose,
    RobotState,
    calibrate_speed_band,
    leading_wheel,
    step,
)
from .mission import (
    HEADING_UP,
    Behavior,
    BehaviorDirective,
    MissionInputs,
    MissionMemory,
    MissionState,
    ReverseSense,
    mission_step,
)
from .power import ChargePhase, charge_step, discharge_step
from .scenario import Scenario, load_scenario
from .sensors import (
    PresetValues,
    UltrasonicReading,
    accel_reduce,
    battery_dot_level,
    derive_presets,
    detect_cliff,
    gravity_components,
    look_down_point,
    sample_accel_batch,
    simulate_echo,
)
from .world import (
    BumpLine,
    CoverageGrid,
    Region,
    RegionKind,
    apply_cleaning,
    build_workspace,
    bump_crossing,
    coverage_fraction,
    head_footprint,
    new_coverage_grid,
    region_at,
)

logger = logging.getLogger(__name__)

# a turn that has not settled by then is abandoned where it stands
MAX_TURN_S = 60.0
# a bumped line stays latched until the axle crosses it or moves this far away from it
BUMP_LATCH_M = 0.02

_STRAIGHT_MODES = {
    Behavior.ASCEND: Mode.ASCEND,
    Behavior.DESCEND: Mode.DESCEND,
    Behavior.LATERAL: Mode.LATERAL,
}
_LATERAL_STATES = (MissionState.LATERAL_TOP, MissionState.LATERAL_BOTTOM)


def _distance_to(line: BumpLine, point: Tuple[float, float]) -> float:
    along = 0 if line.axis == "x" else 1
    return abs(point[along] - line.position_m)


@dataclass(frozen=True)
class TraceRow:
    t_s: float
    state: str
    ultra_in: float
    duty_left: int
    duty_right: int
    accel_x: int
    accel_y: int
    battery_v: float
    x_m: float
    y_m: float
    heading_rad: float
    vacuum_on: bool


@dataclass(frozen=True)
class TransitionEvent:
    t_s: float
    from_state: str
    to_state: str
    column_index: int


@dataclass(frozen=True)
class RunSummary:
    coverage_fraction: float
    columns_completed: int
    dock_events: int
    resume_column: Optional[int]
    mean_ascend_speed_mps: Optional[float]
    mean_descend_speed_mps: Optional[float]
    sim_wall_ratio: Optional[float]
    columns_finished: int
    final_battery_v: float
    battery_dots: int
    sim_time_s: float
    ticks: int
    final_state: str


@dataclass
class RunResult:
    trace: List[TraceRow]
    events: List[TransitionEvent]
    summary: RunSummary
    grid: CoverageGrid
    memory: MissionMemory
    bump_times: List[float] = field(default_factory=list)
    scenario: Optional[Scenario] = None


class Simulation:
    """One run of a scenario. Construct, then call ``run()`` once."""

    def __init__(self, scenario: Scenario, progress: bool = False):
        self.scenario = scenario
        self.progress = progress
        self.ws = build_workspace(scenario.layout)
        self.kin: KinematicParams = (
            calibrate_speed_band(scenario.kinematics)
            if scenario.calibrate_speed_band
            else scenario.kinematics
        )
        streams = np.random.SeedSequence(scenario.seed).spawn(2)
        self.rng_a = np.random.default_rng(streams[0])
        self.rng_b = np.random.default_rng(streams[1])

        self.grid = new_coverage_grid(self.ws, scenario.cleaning.cell_size_m)
        first_panel = self.ws.panels[0]
        start = Pose(
            first_panel.x_min + scenario.mission_cfg.nozzle_width_m / 2.0,
            first_panel.y_min,
            HEADING_UP,
        )
        self.robot = RobotState(start, 0.0)
        self.battery = scenario.battery
        dock = self.ws.dock
        self.dock_x = (dock.x_min + dock.x_max) / 2.0

        self.state = MissionState.ASCEND
        self.mem = MissionMemory()
        self.pid = PidState()
        self.turn_progress = TurnProgress()
        self.turn_plan: Optional[TurnPlan] = None
        self.turn_ticks = 0
        self.turn_done = False
        self.phase_key: Tuple = (self.state, self.mem.transit_stage)

        self.charge_phase = ChargePhase.CC
        self.t_cv_s = 0.0
        self.lateral_progress_m = 0.0
        self.fault_fired = False
        self.bump_latch: Optional[BumpLine] = None
        self._presets: Dict[Tuple[float, float], PresetValues] = {}

    def _presets_for(self, incline_deg: float, heading: float) -> PresetValues:
        if self.scenario.presets is not None:
            return self.scenario.presets
        key = (incline_deg, heading)
        if key not in self._presets:
            self._presets[key] = derive_presets(self.scenario.accel_cfg, incline_deg, heading)
        return self._presets[key]

    def _battery_low(self) -> bool:
        if self.battery.terminal_v < self.scenario.mission_cfg.low_battery_v:
            return True
        forced = self.scenario.faults.force_low_battery_at_column
        return forced is not None and not self.fault_fired and self.mem.column_index == forced

    def _sense(self, region: Optional[Region]):
        cfg = self.scenario.accel_cfg
        incline = region.incline_deg if region is not None else 0.0
        g = gravity_components(incline, self.robot.pose.heading_rad, cfg.mount_yaw_deg)
        frame = accel_reduce(
            sample_accel_batch(g, cfg, self.rng_a, cfg.n_samples),
            sample_accel_batch(g, cfg, self.rng_b, cfg.n_samples),
            cfg,
        )
        us = self.scenario.ultrasonic
        point = look_down_point(self.robot.pose, us.lookahead_m)
        reading = UltrasonicReading.from_echo(
            simulate_echo(point, self.ws, us.mount_height_in, us.max_range_in)
        )
        return frame, reading.distance_in

    def _on_state_change(self, old: MissionState, new: MissionState, t: float, events: List[TransitionEvent]):
        events.append(TransitionEvent(t, old.value, new.value, self.mem.column_index))
        if new in _LATERAL_STATES:
            self.lateral_progress_m = 0.0
        if new is MissionState.CHARGING:
            self.charge_phase = ChargePhase.CC
            self.t_cv_s = 0.0
        if old is MissionState.BATTERY_CHECK and new is MissionState.TRANSIT_TO_DOCK:
            if self.battery.terminal_v >= self.scenario.mission_cfg.low_battery_v:
                self.fault_fired = True
                logger.warning(f"Forced low battery at column {self.mem.column_index}")

    def _turn(self, directive: BehaviorDirective, frame, incline: float) -> MotorCommand:
        sc = self.scenario
        if self.turn_plan is None:
            self.turn_plan = plan_turn(
                sc.accel_cfg, incline, self.robot.pose.heading_rad, directive.heading,
                self.kin, sc.refs, sc.dt_s,
            )
            self.turn_progress = TurnProgress()
            self.turn_ticks = 0
        plan = self.turn_plan
        self.turn_ticks += 1
        if self.turn_ticks * sc.dt_s > MAX_TURN_S:
            logger.warning(f"Turn toward {plan.target_heading:.3f} rad did not settle, abandoning it")
            self.turn_done = True
            return stop_command()

        if plan.align_axis is None:
            if self.turn_ticks > plan.timed_ticks:
                self.turn_done = True
                return stop_command()
            return timed_turn_command(plan.rotate_cw, sc.refs)

        presets = self._presets_for(incline, 0.0)
        cmd, self.pid, self.turn_progress, done = turn_command(
            frame, presets, plan.align_axis, plan.direction, self.pid, sc.turn_gains,
            self.turn_progress, sc.refs, setpoint=plan.setpoint,
        )
        if done:
            self.turn_done = True
            return stop_command()
        return cmd

    def _command(self, directive: BehaviorDirective, frame, incline: float) -> MotorCommand:
        sc = self.scenario
        behavior = directive.behavior
        if behavior is Behavior.TURN:
            return self._turn(directive, frame, incline)
        if behavior in _STRAIGHT_MODES:
            mode = _STRAIGHT_MODES[behavior]
            axis = Axis.Y if behavior is Behavior.LATERAL else Axis.X
            if not can_steer(sc.accel_cfg, incline, directive.heading, axis):
                return open_loop_command(mode, sc.refs)
            heading = directive.heading if behavior is Behavior.LATERAL else 0.0
            presets = self._presets_for(incline, heading)
            cmd, self.pid = heading_command(mode, frame, presets, sc.refs, self.pid, sc.gains)
            return cmd
        if behavior is Behavior.REVERSE:
            ref = sc.refs.ref_down if directive.reverse is ReverseSense.DOWN_SLOPE else sc.refs.ref_up
            return reverse_command(ref)
        return stop_command()

    def _advance(self, cmd: MotorCommand, region: Optional[Region], t: float, bump_times: List[float]):
        sc = self.scenario
        old = self.robot
        moved = step(old, cmd, region, False, sc.dt_s, self.kin)
        p0 = (old.pose.x_m, old.pose.y_m)
        p1 = (moved.pose.x_m, moved.pose.y_m)
        line = bump_crossing(self.ws, p0, p1)
        if line is not None and line == self.bump_latch:
            # already bumped on the way to this line; let the axle finish crossing it
            self.bump_latch = None
        elif line is not None:
            wheel = leading_wheel(
                old.pose, math.copysign(1.0, moved.speed_mps), line.axis, self.kin.track_width_m
            )
            moved = step(old, cmd, region, True, sc.dt_s, self.kin, leading=wheel)
            bump_times.append(t)
            logger.debug(f"Bump at t={t:.2f} s, {wheel.value} wheel leading")
            if bump_crossing(self.ws, p0, (moved.pose.x_m, moved.pose.y_m)) != line:
                self.bump_latch = line
        elif self.bump_latch is not None and _distance_to(self.bump_latch, p1) > BUMP_LATCH_M:
            self.bump_latch = None
        self.robot = moved

    def _power(self, directive: BehaviorDirective, cmd: MotorCommand, vacuum_on: bool) -> bool:
        """Returns True once the charger has disconnected."""
        sc = self.scenario
        if directive.behavior is Behavior.CHARGE:
            prev_phase = self.charge_phase
            self.battery, _, self.charge_phase = charge_step(
                self.battery, sc.charger, self.charge_phase, sc.dt_s, self.t_cv_s
            )
            if prev_phase is ChargePhase.CV and self.charge_phase is ChargePhase.CV:
                self.t_cv_s += sc.dt_s
            return self.charge_phase is ChargePhase.DONE
        load = sc.loads.total_w(cmd.duty_left, cmd.duty_right, vacuum_on)
        self.battery = discharge_step(self.battery, load, sc.dt_s)
        return False

    def run(self) -> RunResult:
        sc = self.scenario
        dt = sc.dt_s
        n_ticks = int(math.floor(sc.max_sim_s / dt + 1e-9))
        trace: List[TraceRow] = []
        events: List[TransitionEvent] = []
        bump_times: List[float] = []
        ascend_speeds: List[float] = []
        descend_speeds: List[float] = []
        charge_complete = False

        logger.info(
            f"Starting run: {len(self.ws.regions)} region(s), seed {sc.seed}, up to {n_ticks} ticks"
        )
        wall_start = time.perf_counter()
        ticks = 0
        with tqdm(total=n_ticks, disable=not self.progress, desc="simulate", unit="tick") as bar:
            for k in range(n_ticks):
                t = k * dt
                pose = self.robot.pose
                region = region_at(self.ws, (pose.x_m, pose.y_m))
                incline = region.incline_deg if region is not None else 0.0
                on_panel = region is not None and region.kind is RegionKind.PANEL

                frame, ultra_in = self._sense(region)
                inputs = MissionInputs(
                    cliff=detect_cliff(ultra_in, sc.mission_cfg.cliff_threshold_in),
                    turn_done=self.turn_done,
                    battery_low=self._battery_low(),
                    charge_complete=charge_complete,
                    at_dock=abs(pose.x_m - self.dock_x) <= sc.mission_cfg.dock_tolerance_m,
                    lateral_progress_m=self.lateral_progress_m,
                    on_panel=on_panel,
                    dt_s=dt,
                    heading_rad=pose.heading_rad,
                )
                previous = self.state
                self.state, self.mem, directive = mission_step(self.state, self.mem, inputs, sc.mission_cfg)
                if self.state is not previous:
                    self._on_state_change(previous, self.state, t, events)

                key = (self.state, self.mem.transit_stage)
                if key != self.phase_key:
                    self.phase_key = key
                    self.pid = PidState()
                    self.turn_plan = None
                self.turn_done = False

                cmd = self._command(directive, frame, incline)
                self._advance(cmd, region, t, bump_times)
                new_pose = self.robot.pose

                if self.state in _LATERAL_STATES and on_panel:
                    self.lateral_progress_m += new_pose.x_m - pose.x_m
                if directive.behavior is Behavior.ASCEND and not cmd.is_brake:
                    ascend_speeds.append(self.robot.speed_mps)
                elif directive.behavior is Behavior.DESCEND and not cmd.is_brake:
                    descend_speeds.append(self.robot.speed_mps)

                vacuum_on = directive.vacuum_on and on_panel
                if vacuum_on:
                    c = sc.cleaning
                    footprint = head_footprint(new_pose.as_tuple(), c.brush_width_m, c.head_front_m, c.head_rear_m)
                    self.grid = apply_cleaning(self.grid, footprint, c.efficiency)

                charge_complete = self._power(directive, cmd, vacuum_on)

                trace.append(TraceRow(
                    t_s=t,
                    state=self.state.value,
                    ultra_in=ultra_in,
                    duty_left=cmd.duty_left,
                    duty_right=cmd.duty_right,
                    accel_x=frame.x1,
                    accel_y=frame.y1,
                    battery_v=self.battery.terminal_v,
                    x_m=new_pose.x_m,
                    y_m=new_pose.y_m,
                    heading_rad=new_pose.heading_rad,
                    vacuum_on=vacuum_on,
                ))
                ticks += 1
                bar.update(1)
                if self.state is MissionState.IDLE:
                    break
            else:
                logger.warning(f"Run stopped at max_sim_s={sc.max_sim_s:.1f} s in state {self.state.value}")

        wall = time.perf_counter() - wall_start
        summary = self._summarize(events, ascend_speeds, descend_speeds, ticks, wall)
        logger.info(
            f"Run finished after {summary.sim_time_s:.1f} s simulated ({ticks} ticks): "
            f"coverage {summary.coverage_fraction:.4f}, {summary.columns_completed} sweep columns, "
            f"{summary.dock_events} dock event(s)"
        )
        return RunResult(trace, events, summary, self.grid, self.mem, bump_times, sc)

    def _summarize(self, events, ascend_speeds, descend_speeds, ticks, wall) -> RunSummary:
        sc = self.scenario
        edges = {("Ascend", "ReverseTop"), ("Descend", "ReverseBottom")}
        columns_completed = sum(1 for e in events if (e.from_state, e.to_state) in edges)
        dock_events = sum(1 for e in events if e.to_state == MissionState.DOCKING.value)
        resume_column = None
        for e in events:
            if e.from_state == MissionState.RESUME_TRANSIT.value and e.to_state == MissionState.ASCEND.value:
                resume_column = e.column_index
        sim_time = ticks * sc.dt_s
        return RunSummary(
            coverage_fraction=coverage_fraction(self.grid, sc.cleaning.clean_threshold),
            columns_completed=columns_completed,
            dock_events=dock_events,
            resume_column=resume_column,
            mean_ascend_speed_mps=float(np.mean(ascend_speeds)) if ascend_speeds else None,
            mean_descend_speed_mps=float(np.mean(descend_speeds)) if descend_speeds else None,
            sim_wall_ratio=sim_time / wall if wall > 0 else None,
            columns_finished=self.mem.column_index,
            final_battery_v=self.battery.terminal_v,
            battery_dots=battery_dot_level(self.battery.terminal_v, self.battery.v_full),
            sim_time_s=sim_time,
            ticks=ticks,
            final_state=self.state.value,
        )


def run(scenario: Scenario, progress: bool = False) -> RunResult:
    """Simulate ``scenario`` from tick 0 until Idle or max_sim_s."""
    return Simulation(scenario, progress=progress).run()


def run_from_file(
    path: Union[str, Path],
    seed: Optional[int] = None,
    max_sim_s: Optional[float] = None,
    progress: bool = False,
) -> RunResult:
    """Load a scenario file, apply command-line overrides and run it."""
    scenario = load_scenario(path)
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if max_sim_s is not None:
        overrides["max_sim_s"] = max_sim_s
    if overrides:
        scenario = replace(scenario, **overrides)
    return run(scenario, progress=progress)
