"""
First-order kinematics of the differential-drive robot on inclined panels.

Wheel speeds follow the signed PWM duty linearly, with a gravity bias that pulls the
robot down-slope. Accelerations are treated as instantaneous at these speeds.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from .world import Region

logger = logging.getLogger(__name__)

DUTY_PERIOD = 1000
UPSLOPE_HEADING = math.pi / 2.0
SPEED_BAND_MPS = (0.02, 0.06)


class Wheel(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class KinematicParams:
    track_width_m: float = 0.20
    wheel_diameter_m: float = 0.113
    free_speed_mps: float = 0.0889
    gravity_gain_mps: float = 0.0622
    bump_slow_factor: float = 0.3
    bump_heading_kick_rad: float = 0.08

    def __post_init__(self):
        for name in ("track_width_m", "wheel_diameter_m", "free_speed_mps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.gravity_gain_mps < 0:
            raise ValueError(f"gravity_gain_mps must be >= 0, got {self.gravity_gain_mps}")
        if not 0.0 < self.bump_slow_factor <= 1.0:
            raise ValueError(f"bump_slow_factor must lie in (0, 1], got {self.bump_slow_factor}")
        if self.bump_heading_kick_rad < 0:
            raise ValueError(
                f"bump_heading_kick_rad must be >= 0, got {self.bump_heading_kick_rad}"
            )


@dataclass(frozen=True)
class MotorCommand:
    """Signed PWM compare values against a period of 1000; the sign is the direction."""

    duty_left: int = 0
    duty_right: int = 0

    def __post_init__(self):
        for name in ("duty_left", "duty_right"):
            value = getattr(self, name)
            if abs(value) > DUTY_PERIOD:
                raise ValueError(f"|{name}| must be <= {DUTY_PERIOD}, got {value}")

    @property
    def is_brake(self) -> bool:
        return self.duty_left == 0 and self.duty_right == 0

    @property
    def counter_rotating(self) -> bool:
        return self.duty_left * self.duty_right < 0


@dataclass(frozen=True)
class Pose:
    x_m: float
    y_m: float
    heading_rad: float

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.x_m, self.y_m, self.heading_rad)


@dataclass(frozen=True)
class RobotState:
    pose: Pose
    speed_mps: float = 0.0


def normalize_angle(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    if -math.pi < angle <= math.pi:
        return angle
    angle = math.fmod(angle, 2.0 * math.pi)
    if angle <= -math.pi:
        angle += 2.0 * math.pi
    elif angle > math.pi:
        angle -= 2.0 * math.pi
    return angle


def wheel_speed(duty: float, incline_deg: float, heading_rad: float, params: KinematicParams) -> float:
    """
    Ground speed of one wheel.

    Args:
        duty: Signed duty in [-1000, 1000]
        incline_deg: Incline of the surface under the robot
        heading_rad: Heading, CCW from +x
        params: Kinematic parameters

    Returns:
        Speed in m/s; positive is forward
    """
    if abs(duty) > DUTY_PERIOD:
        raise ValueError(f"|duty| must be <= {DUTY_PERIOD}, got {duty}")
    slope = math.sin(math.radians(incline_deg)) * math.cos(heading_rad - UPSLOPE_HEADING)
    return params.free_speed_mps * duty / DUTY_PERIOD - params.gravity_gain_mps * slope


def step(
    state: RobotState,
    cmd: MotorCommand,
    region: Optional[Region],
    on_bump: bool,
    dt: float,
    params: KinematicParams,
    leading: Wheel = Wheel.RIGHT,
) -> RobotState:
    """
    Advance the robot by one Euler step.

    A brake (0, 0) stops the robot dead. Counter-rotating wheels turn it in place:
    the gripper wheels hold it against the slope. Otherwise both wheels carry the
    gravity bias of the region under the axle.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    pose = state.pose
    if cmd.is_brake:
        return RobotState(pose, 0.0)

    incline = region.incline_deg if region is not None else 0.0
    h = pose.heading_rad
    if cmd.counter_rotating:
        u_left = wheel_speed(cmd.duty_left, 0.0, h, params)
        u_right = wheel_speed(cmd.duty_right, 0.0, h, params)
        v = 0.0
    else:
        u_left = wheel_speed(cmd.duty_left, incline, h, params)
        u_right = wheel_speed(cmd.duty_right, incline, h, params)
        v = (u_left + u_right) / 2.0
    omega = (u_right - u_left) / params.track_width_m

    kick = 0.0
    if on_bump:
        v *= params.bump_slow_factor
        kick = params.bump_heading_kick_rad if leading is Wheel.LEFT else -params.bump_heading_kick_rad

    new_pose = Pose(
        pose.x_m + v * math.cos(h) * dt,
        pose.y_m + v * math.sin(h) * dt,
        normalize_angle(h + omega * dt + kick),
    )
    return RobotState(new_pose, v)


def leading_wheel(pose: Pose, travel_sign: float, line_axis: str, track_width_m: float) -> Wheel:
    """
    Wheel whose contact point is further along the direction of travel across a bump line.

    Ties go to the right wheel.
    """
    h = pose.heading_rad
    normal = (1.0, 0.0) if line_axis == "x" else (0.0, 1.0)
    direction = (travel_sign * math.cos(h), travel_sign * math.sin(h))
    crossing = math.copysign(1.0, direction[0] * normal[0] + direction[1] * normal[1])
    half = track_width_m / 2.0
    # left wheel sits at +half along the body normal, right wheel at -half
    left_minus_right = 2.0 * half * (-math.sin(h) * normal[0] + math.cos(h) * normal[1])
    return Wheel.LEFT if left_minus_right * crossing > 0 else Wheel.RIGHT


def calibrate_speed_band(
    params: KinematicParams,
    *,
    ascend_duty: int = 800,
    descend_duty: int = 100,
    incline_deg: float = 30.0,
    ascend_speed_mps: Optional[float] = None,
    descend_speed_mps: Optional[float] = None,
    band: Tuple[float, float] = SPEED_BAND_MPS,
) -> KinematicParams:
    """
    Fit free speed and gravity gain so the ascend and descend speeds hit their targets.

    Solves
        free * ascend_duty/1000 - gain * sin(incline) = ascend_speed
        free * descend_duty/1000 + gain * sin(incline) = descend_speed
    with targets defaulting to the band midpoint.

    Args:
        params: Parameters to adjust
        ascend_duty: Duty used when driving up-slope
        descend_duty: Duty used when driving down-slope
        incline_deg: Incline the targets refer to
        ascend_speed_mps: Target ascend speed
        descend_speed_mps: Target descend speed
        band: Allowed (low, high) speed band

    Returns:
        Copy of ``params`` with free_speed_mps and gravity_gain_mps replaced
    """
    lo, hi = band
    if not 0.0 < lo < hi:
        raise ValueError(f"speed band must satisfy 0 < low < high, got {band}")
    mid = (lo + hi) / 2.0
    v_up = mid if ascend_speed_mps is None else ascend_speed_mps
    v_down = mid if descend_speed_mps is None else descend_speed_mps
    for name, v in (("ascend_speed_mps", v_up), ("descend_speed_mps", v_down)):
        if not lo <= v <= hi:
            raise ValueError(f"{name}={v} lies outside the speed band {band}")
    for name, duty in (("ascend_duty", ascend_duty), ("descend_duty", descend_duty)):
        if not 0 < duty <= DUTY_PERIOD:
            raise ValueError(f"{name} must lie in (0, {DUTY_PERIOD}], got {duty}")

    s = math.sin(math.radians(incline_deg))
    if abs(s) < 1e-12:
        free_up = v_up * DUTY_PERIOD / ascend_duty
        free_down = v_down * DUTY_PERIOD / descend_duty
        if not math.isclose(free_up, free_down, rel_tol=1e-9):
            raise ValueError(
                "contradictory targets on flat ground: "
                f"free speed {free_up:.6g} vs {free_down:.6g} m/s"
            )
        free, gain = free_up, 0.0
    else:
        a = np.array([[ascend_duty / DUTY_PERIOD, -s], [descend_duty / DUTY_PERIOD, s]])
        b = np.array([v_up, v_down])
        try:
            free, gain = linalg.solve(a, b)
        except linalg.LinAlgError as exc:
            raise ValueError(f"speed band calibration is singular: {exc}") from exc

    if not free > 0 or gain < 0:
        raise ValueError(
            f"infeasible speed targets: free_speed_mps={free:.6g}, gravity_gain_mps={gain:.6g}"
        )
    calibrated = replace(params, free_speed_mps=float(free), gravity_gain_mps=float(gain))
    rpm = wheel_rpm(calibrated.free_speed_mps, calibrated)
    logger.info(
        f"Calibrated speed band: free speed {calibrated.free_speed_mps:.5f} m/s ({rpm:.1f} rpm), "
        f"gravity gain {calibrated.gravity_gain_mps:.5f} m/s"
    )
    return calibrated


def turn_rate(params: KinematicParams, ref_turn: float) -> float:
    """Yaw rate in rad/s of a zero-radius turn with both wheels at ``ref_turn``."""
    return 2.0 * params.free_speed_mps * ref_turn / DUTY_PERIOD / params.track_width_m


def wheel_rpm(speed_mps: float, params: KinematicParams) -> float:
    return speed_mps / (math.pi * params.wheel_diameter_m) * 60.0
