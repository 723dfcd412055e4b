"""
Tests for the differential-drive kinematics and the speed band calibration.
"""

import math

import pytest

from utils.dynamics import (
    KinematicParams,
    MotorCommand,
    Pose,
    RobotState,
    Wheel,
    calibrate_speed_band,
    leading_wheel,
    normalize_angle,
    step,
    turn_rate,
    wheel_speed,
)
from utils.world import Region, RegionKind

FLAT = Region(RegionKind.PANEL, 0, 0.0, 1.0, 0.0, 1.0, 0.0)
SLOPE = Region(RegionKind.PANEL, 0, 0.0, 1.0, 0.0, 1.0, 30.0)
UP = math.pi / 2


@pytest.fixture
def params():
    return KinematicParams()


@pytest.fixture
def start():
    return RobotState(Pose(0.5, 0.5, UP))


def test_wheel_speed_definitions(params):
    assert wheel_speed(0, 0.0, UP, params) == 0.0
    assert wheel_speed(1000, 0.0, 1.234, params) == pytest.approx(params.free_speed_mps, rel=1e-12)
    with pytest.raises(ValueError):
        wheel_speed(1001, 0.0, UP, params)


def test_gravity_pulls_down_slope(params):
    up = wheel_speed(500, 30.0, UP, params)
    down = wheel_speed(500, 30.0, -UP, params)
    across = wheel_speed(500, 30.0, 0.0, params)
    assert up < across < down
    assert across == pytest.approx(params.free_speed_mps * 0.5)


def test_calibrated_ascend_speed_in_band(params):
    cal = calibrate_speed_band(params)
    assert 0.02 <= wheel_speed(800, 30.0, UP, cal) <= 0.06
    assert 0.02 <= wheel_speed(100, 30.0, -UP, cal) <= 0.06
    assert cal.free_speed_mps == pytest.approx(0.08 / 0.9)
    assert cal.gravity_gain_mps == pytest.approx(0.06222, abs=1e-5)


def test_symmetric_command_goes_straight(params, start):
    moved = step(start, MotorCommand(600, 600), FLAT, False, 0.02, params)
    assert moved.pose.heading_rad == start.pose.heading_rad
    v = params.free_speed_mps * 0.6
    assert moved.speed_mps == pytest.approx(v)
    assert moved.pose.y_m - start.pose.y_m == pytest.approx(v * 0.02, abs=1e-12)
    assert moved.pose.x_m == pytest.approx(start.pose.x_m, abs=1e-12)


@pytest.mark.parametrize("region", [FLAT, SLOPE])
def test_antisymmetric_command_turns_in_place(params, start, region):
    moved = step(start, MotorCommand(-400, 400), region, False, 0.02, params)
    assert moved.pose.x_m == start.pose.x_m
    assert moved.pose.y_m == start.pose.y_m
    expected = 2 * params.free_speed_mps * 0.4 / params.track_width_m * 0.02
    assert moved.pose.heading_rad - UP == pytest.approx(expected)


def test_brake_stops_dead_on_slope(params, start):
    moving = RobotState(start.pose, 0.03)
    braked = step(moving, MotorCommand(0, 0), SLOPE, False, 0.02, params)
    assert braked.speed_mps == 0.0
    assert braked.pose == start.pose
    assert step(braked, MotorCommand(0, 0), SLOPE, False, 0.02, params) == braked


def test_bump_slows_and_kicks(params, start):
    cmd = MotorCommand(800, 800)
    free = step(start, cmd, SLOPE, False, 0.02, params)
    bumped = step(start, cmd, SLOPE, True, 0.02, params, leading=Wheel.LEFT)
    assert bumped.speed_mps == pytest.approx(0.3 * free.speed_mps)
    assert bumped.pose.heading_rad - UP == pytest.approx(params.bump_heading_kick_rad)
    right = step(start, cmd, SLOPE, True, 0.02, params, leading=Wheel.RIGHT)
    assert right.pose.heading_rad - UP == pytest.approx(-params.bump_heading_kick_rad)


def test_step_is_deterministic(params, start):
    a = step(start, MotorCommand(713, 655), SLOPE, True, 0.02, params)
    b = step(start, MotorCommand(713, 655), SLOPE, True, 0.02, params)
    assert a == b


def test_step_rejects_non_positive_dt(params, start):
    with pytest.raises(ValueError):
        step(start, MotorCommand(100, 100), FLAT, False, 0.0, params)


def test_displacement_without_gravity(start):
    params = KinematicParams(gravity_gain_mps=0.0)
    moved = step(start, MotorCommand(300, 500), SLOPE, False, 0.02, params)
    dist = math.hypot(moved.pose.x_m - start.pose.x_m, moved.pose.y_m - start.pose.y_m)
    assert dist == pytest.approx(0.4 * params.free_speed_mps * 0.02, rel=1e-12)


def test_heading_stays_normalized(params):
    state = RobotState(Pose(0.0, 0.0, math.pi - 0.001))
    moved = step(state, MotorCommand(-1000, 1000), FLAT, False, 0.1, params)
    assert -math.pi < moved.pose.heading_rad <= math.pi


def test_normalize_angle():
    assert normalize_angle(3 * math.pi) == pytest.approx(math.pi)
    assert normalize_angle(-math.pi) == pytest.approx(math.pi)
    assert normalize_angle(0.25) == 0.25


def test_leading_wheel():
    track = 0.2
    assert leading_wheel(Pose(0, 0, UP - 0.1), 1.0, "y", track) is Wheel.LEFT
    assert leading_wheel(Pose(0, 0, UP + 0.1), 1.0, "y", track) is Wheel.RIGHT
    # backing across the line swaps which wheel arrives first
    assert leading_wheel(Pose(0, 0, UP - 0.1), -1.0, "y", track) is Wheel.RIGHT


def test_calibration_solves_targets_exactly(params):
    cal = calibrate_speed_band(params, ascend_speed_mps=0.025, descend_speed_mps=0.025)
    s = math.sin(math.radians(30.0))
    assert cal.free_speed_mps * 0.8 - cal.gravity_gain_mps * s == pytest.approx(0.025, abs=1e-12)
    assert cal.free_speed_mps * 0.1 + cal.gravity_gain_mps * s == pytest.approx(0.025, abs=1e-12)


def test_calibration_on_flat_ground(params):
    cal = calibrate_speed_band(
        params, ascend_duty=500, descend_duty=500, incline_deg=0.0,
        ascend_speed_mps=0.03, descend_speed_mps=0.03,
    )
    assert cal.gravity_gain_mps == 0.0
    assert cal.free_speed_mps == pytest.approx(0.06)


@pytest.mark.parametrize("kwargs", [
    {"ascend_speed_mps": 0.06, "descend_speed_mps": 0.02, "descend_duty": 800},
    {"incline_deg": 0.0, "ascend_speed_mps": 0.02, "descend_speed_mps": 0.06},
    {"ascend_speed_mps": 0.07},
    {"band": (0.06, 0.02)},
])
def test_calibration_rejects_infeasible_targets(params, kwargs):
    with pytest.raises(ValueError):
        calibrate_speed_band(params, **kwargs)


def test_turn_rate(params):
    assert turn_rate(params, 500) == pytest.approx(2 * params.free_speed_mps * 0.5 / 0.2)
