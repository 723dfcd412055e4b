"""
PID heading regulation and the behavior-level motor command generators:
straight drive (ascend, descend, lateral), oscillation-terminated turns,
reversing and braking.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

from .dynamics import DUTY_PERIOD, KinematicParams, MotorCommand, normalize_angle, turn_rate
from .sensors import (
    ADC_DIVISOR,
    AccelConfig,
    AccelFrame,
    PresetValues,
    axis_slope,
    expected_frame,
    gravity_components,
)

logger = logging.getLogger(__name__)

EI_LIMIT = 10_000.0
# below this many reduced counts per radian of yaw an axis cannot steer
MIN_COUNTS_PER_RAD = 12.0
PLAN_SAMPLES = 180


@dataclass(frozen=True)
class PidGains:
    kp: float = 20.0
    ki: float = 2.0
    kd: float = 10.0

    def __post_init__(self):
        for name in ("kp", "ki", "kd"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)}")


@dataclass(frozen=True)
class PidState:
    ei: float = 0.0
    prev_error: float = 0.0


@dataclass(frozen=True)
class SpeedRefs:
    ref_up: int = 800
    ref_down: int = 100
    ref_turn: int = 500
    ref_lateral: int = 300

    def __post_init__(self):
        for name in ("ref_up", "ref_down", "ref_turn", "ref_lateral"):
            if not 0 <= getattr(self, name) <= DUTY_PERIOD:
                raise ValueError(f"{name} must lie in [0, {DUTY_PERIOD}], got {getattr(self, name)}")


class Mode(Enum):
    ASCEND = "ascend"
    DESCEND = "descend"
    LATERAL = "lateral"


class Axis(Enum):
    X = "x"
    Y = "y"


class TurnDirection(Enum):
    """Rotation produced by a positive control output; CCW negates e."""

    CW = "CW"
    CCW = "CCW"


@dataclass(frozen=True)
class TurnProgress:
    last_sign: Optional[int] = None
    flip_count: int = 0
    flip_target: int = 5


@dataclass(frozen=True)
class TurnPlan:
    """How to execute one turn. align_axis None means a timed turn of timed_ticks ticks."""

    align_axis: Optional[Axis]
    setpoint: int
    direction: TurnDirection
    target_heading: float
    rotate_cw: bool
    timed_ticks: int = 0


def _clamp_duty(value: float) -> int:
    return int(min(max(round(value), 0), DUTY_PERIOD))


def pid_step(
    state: PidState,
    error: float,
    gains: PidGains,
    ei_limit: float = EI_LIMIT,
) -> Tuple[float, PidState]:
    """
    One update of e = ep*kp + ei*ki + ed*kd.

    Args:
        state: Accumulated integral and previous error
        error: Proportional error this tick
        gains: PID gains
        ei_limit: Symmetric cap on the integral term

    Returns:
        (e, new state)
    """
    if not math.isfinite(error):
        raise ValueError(f"error must be finite, got {error}")
    ei = state.ei + error
    ei = max(-ei_limit, min(ei_limit, ei))
    ed = error - state.prev_error
    e = error * gains.kp + ei * gains.ki + ed * gains.kd
    return e, PidState(ei=ei, prev_error=error)


def heading_command(
    mode: Mode,
    frame: AccelFrame,
    presets: PresetValues,
    refs: SpeedRefs,
    pid: PidState,
    gains: PidGains,
) -> Tuple[MotorCommand, PidState]:
    """Straight drive with both wheels forward at ref +/- e."""
    if mode is Mode.ASCEND:
        value, preset, ref, polarity = frame.x1, presets.x1_set_up, refs.ref_up, presets.ascend_polarity
    elif mode is Mode.DESCEND:
        value, preset, ref, polarity = frame.x1, presets.x1_set_down, refs.ref_down, presets.descend_polarity
    else:
        value, preset, ref, polarity = (
            frame.y1, presets.y1_set_lateral, refs.ref_lateral, presets.lateral_polarity,
        )
    error = polarity * (value - preset)
    e, new_pid = pid_step(pid, error, gains)
    return MotorCommand(_clamp_duty(ref + e), _clamp_duty(ref - e)), new_pid


def open_loop_command(mode: Mode, refs: SpeedRefs) -> MotorCommand:
    """Straight drive without feedback, used where the incline gives no heading signal."""
    ref = {Mode.ASCEND: refs.ref_up, Mode.DESCEND: refs.ref_down, Mode.LATERAL: refs.ref_lateral}[mode]
    return MotorCommand(ref, ref)


def turn_command(
    frame: AccelFrame,
    presets: PresetValues,
    align_axis: Axis,
    direction: TurnDirection,
    pid: PidState,
    gains: PidGains,
    progress: TurnProgress,
    refs: SpeedRefs = SpeedRefs(),
    setpoint: Optional[float] = None,
) -> Tuple[MotorCommand, PidState, TurnProgress, bool]:
    """
    Zero-radius turn toward the point where the selected axis reads its setpoint.

    e >= 0 spins clockwise (left forward, right reverse), e < 0 counter-clockwise.
    The turn is done once e has changed sign flip_target times, i.e. the robot
    oscillates about the setpoint.

    Returns:
        (command, new PID state, new progress, done)
    """
    if align_axis is Axis.X:
        value = frame.x1
        target = presets.x1_set_turn if setpoint is None else setpoint
    else:
        value = frame.y1
        target = presets.y1_set_turn if setpoint is None else setpoint
    e, new_pid = pid_step(pid, value - target, gains)
    if direction is TurnDirection.CCW:
        e = -e

    sign = 1 if e >= 0 else -1
    left_mag = _clamp_duty(refs.ref_turn - e)
    right_mag = _clamp_duty(refs.ref_turn + e)
    if sign > 0:
        cmd = MotorCommand(left_mag, -right_mag)
    else:
        cmd = MotorCommand(-left_mag, right_mag)

    flips = progress.flip_count
    if progress.last_sign is not None and sign != progress.last_sign:
        flips = min(flips + 1, progress.flip_target)
    new_progress = replace(progress, last_sign=sign, flip_count=flips)
    return cmd, new_pid, new_progress, flips >= progress.flip_target


def stop_command() -> MotorCommand:
    return MotorCommand(0, 0)


def reverse_command(ref: int) -> MotorCommand:
    return MotorCommand(-ref, -ref)


def timed_turn_command(rotate_cw: bool, refs: SpeedRefs) -> MotorCommand:
    if rotate_cw:
        return MotorCommand(refs.ref_turn, -refs.ref_turn)
    return MotorCommand(-refs.ref_turn, refs.ref_turn)


def _axis_value(cfg: AccelConfig, incline_deg: float, heading: float, axis: Axis) -> float:
    gx, gy, _ = gravity_components(incline_deg, heading, cfg.mount_yaw_deg)
    return gx if axis is Axis.X else gy


def counts_per_radian(cfg: AccelConfig, incline_deg: float, heading_rad: float, axis: Axis) -> float:
    """Change of the reduced reading on ``axis`` per radian of yaw at ``heading_rad``."""
    counts_per_g = 100.0 * cfg.adc_full_scale / ADC_DIVISOR
    return counts_per_g * abs(axis_slope(cfg, incline_deg, heading_rad, axis.value))


def can_steer(
    cfg: AccelConfig,
    incline_deg: float,
    heading_rad: float,
    axis: Axis,
    min_counts_per_rad: float = MIN_COUNTS_PER_RAD,
) -> bool:
    """True when ``axis`` resolves heading finely enough to close the loop at ``heading_rad``."""
    return counts_per_radian(cfg, incline_deg, heading_rad, axis) >= min_counts_per_rad


def _reading(frame: AccelFrame, axis: Axis) -> int:
    return frame.x1 if axis is Axis.X else frame.y1


def _axis_qualifies(
    cfg: AccelConfig,
    incline_deg: float,
    start_heading: float,
    delta: float,
    target: float,
    axis: Axis,
    negate: bool,
    wanted: float,
) -> bool:
    # the continuous error must keep its sign along the whole path, and the quantized
    # readings must never point the wrong way and must start off the setpoint
    ref_value = _axis_value(cfg, incline_deg, target, axis)
    setpoint = _reading(expected_frame(cfg, incline_deg, target), axis)
    sign = -1.0 if negate else 1.0
    for k in range(PLAN_SAMPLES):
        h = start_heading + delta * k / PLAN_SAMPLES
        err = sign * (_axis_value(cfg, incline_deg, h, axis) - ref_value)
        if err * wanted <= 0:
            return False
        err_q = sign * (_reading(expected_frame(cfg, incline_deg, h), axis) - setpoint)
        if err_q * wanted < 0 or (k == 0 and err_q == 0):
            return False
    return True


def plan_turn(
    cfg: AccelConfig,
    incline_deg: float,
    start_heading: float,
    target_heading: float,
    params: KinematicParams,
    refs: SpeedRefs,
    dt: float,
    min_counts_per_rad: float = MIN_COUNTS_PER_RAD,
) -> TurnPlan:
    """
    Pick the accelerometer axis and sign convention for a turn.

    The turn takes the short way round (ties counter-clockwise). An axis qualifies
    when it resolves at least ``min_counts_per_rad`` at the target, the target is a
    stable zero of its error, and the error (continuous and quantized) keeps the sign
    that drives the rotation the right way along the whole path. Among qualifying
    axes the most sensitive wins. Without one the turn is timed from the kinematics.
    """
    delta = normalize_angle(target_heading - start_heading)
    rotate_cw = delta < 0
    target = normalize_angle(target_heading)
    wanted = 1.0 if rotate_cw else -1.0

    best = None
    for axis in (Axis.X, Axis.Y):
        if not can_steer(cfg, incline_deg, target, axis, min_counts_per_rad):
            continue
        slope = axis_slope(cfg, incline_deg, target, axis.value)
        negate = slope < 0
        if not _axis_qualifies(cfg, incline_deg, start_heading, delta, target, axis, negate, wanted):
            continue
        if best is None or abs(slope) > best[0]:
            best = (abs(slope), axis, TurnDirection.CCW if negate else TurnDirection.CW)

    if best is None:
        rate = turn_rate(params, refs.ref_turn)
        ticks = max(1, int(round(abs(delta) / (rate * dt))))
        logger.debug(f"Timed turn of {delta:.3f} rad over {ticks} ticks")
        return TurnPlan(None, 0, TurnDirection.CW, target, rotate_cw, ticks)

    _, axis, direction = best
    setpoint = _reading(expected_frame(cfg, incline_deg, target), axis)
    logger.debug(f"Turn of {delta:.3f} rad aligned on {axis.value} to {setpoint} ({direction.value})")
    return TurnPlan(axis, setpoint, direction, target, rotate_cw)
