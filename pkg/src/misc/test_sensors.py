"""
Tests for the accelerometer, ultrasonic and battery indicator models.
"""

import math

import numpy as np
import pytest

from utils.dynamics import Pose
from utils.sensors import (
    AccelConfig,
    AccelFrame,
    PresetValues,
    UltrasonicReading,
    accel_reduce,
    battery_dot_level,
    c_round,
    derive_presets,
    detect_cliff,
    expected_frame,
    gravity_components,
    look_down_point,
    sample_accel_batch,
    sample_accel_counts,
    simulate_echo,
    ultra_distance,
)
from utils.world import ArrayLayout, build_workspace

UP = math.pi / 2


@pytest.fixture
def cfg():
    return AccelConfig()


def test_c_round_goes_half_away_from_zero():
    assert c_round(2.5) == 3
    assert c_round(-2.5) == -3
    assert c_round(2.49) == 2


@pytest.mark.parametrize("heading", [0.0, 1.0, -2.5])
def test_flat_counts_sit_at_zero_g(cfg, heading):
    g = gravity_components(0.0, heading, cfg.mount_yaw_deg)
    x, y, _ = sample_accel_counts(g, cfg)
    assert (x, y) == (512, 512)


def test_counts_clamp_to_full_scale(cfg):
    assert sample_accel_counts((10.0, -10.0, 0.0), cfg) == (1023, 0, 512)


def test_seeded_noise_is_reproducible(cfg):
    g = gravity_components(30.0, UP, cfg.mount_yaw_deg)
    a = sample_accel_batch(g, cfg, np.random.default_rng(11), 5)
    b = sample_accel_batch(g, cfg, np.random.default_rng(11), 5)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (5, 3) and a.dtype == np.int64


def test_reduce_uniform_512_gives_206(cfg):
    block = np.full((5, 3), 512)
    assert accel_reduce(block, block, cfg) == AccelFrame(206, 206, 206)


def test_reduce_zero_and_averaging(cfg):
    zeros = np.zeros((5, 3), dtype=int)
    assert accel_reduce(zeros, zeros, cfg) == AccelFrame(0, 0, 0)
    low, high = np.full((5, 3), 500), np.full((5, 3), 524)
    assert accel_reduce(low, high, cfg) == accel_reduce(np.full((5, 3), 512), np.full((5, 3), 512), cfg)


def test_reduce_is_permutation_invariant(cfg):
    rng = np.random.default_rng(5)
    a = rng.integers(0, 1024, size=(5, 3))
    b = rng.integers(0, 1024, size=(5, 3))
    stacked = np.vstack([a, b])
    shuffled = stacked[rng.permutation(10)]
    assert accel_reduce(a, b, cfg) == accel_reduce(shuffled[:5], shuffled[5:], cfg)


def test_reduce_rejects_wrong_sample_count(cfg):
    with pytest.raises(ValueError):
        accel_reduce(np.zeros((4, 3)), np.zeros((5, 3)), cfg)


def test_expected_frame_flat(cfg):
    frame = expected_frame(cfg, 0.0, UP)
    assert (frame.x1, frame.y1) == (206, 206)
    assert 0 <= frame.z1 <= cfg.frame_max


def test_derived_presets_follow_mounting(cfg):
    presets = derive_presets(cfg, 30.0, 0.0)
    assert presets.x1_set_up == expected_frame(cfg, 30.0, UP).x1
    assert presets.x1_set_down == expected_frame(cfg, 30.0, -UP).x1
    assert presets.y1_set_lateral == expected_frame(cfg, 30.0, 0.0).y1
    assert (presets.ascend_polarity, presets.descend_polarity, presets.lateral_polarity) == (1, -1, -1)


def test_zero_yaw_reduces_to_plain_projection():
    cfg = AccelConfig(mount_yaw_deg=0.0)
    ax, ay, az = gravity_components(30.0, UP, cfg.mount_yaw_deg)
    assert (ax, ay) == pytest.approx((0.5, 0.0))
    assert az == pytest.approx(math.cos(math.radians(30.0)))


def test_preset_defaults_and_validation():
    p = PresetValues()
    assert (p.x1_set_up, p.x1_set_down, p.x1_set_turn, p.y1_set_turn) == (218, 218, 217, 247)
    with pytest.raises(ValueError):
        PresetValues(ascend_polarity=0)


@pytest.mark.parametrize("echo,inches", [(0.0, 0.0), (296.28, 2.0), (592.56, 4.0)])
def test_ultra_distance(echo, inches):
    assert ultra_distance(echo) == pytest.approx(inches, abs=1e-3)


def test_ultra_distance_rejects_negative():
    with pytest.raises(ValueError):
        ultra_distance(-1.0)


def test_simulate_echo():
    ws = build_workspace(ArrayLayout())
    assert simulate_echo((0.5, 0.5), ws, 2.0) == pytest.approx(296.28)
    assert simulate_echo((0.5, 1.5), ws, 2.0) == pytest.approx(14814.0)
    assert simulate_echo((0.5, 0.5), ws, 0.0) == 0.0
    reading = UltrasonicReading.from_echo(simulate_echo((0.5, 0.5), ws, 2.0))
    assert reading.distance_in == pytest.approx(2.0, abs=1e-9)


def test_look_down_point_is_ahead_of_the_axle():
    x, y = look_down_point(Pose(0.3, 0.9, UP), 0.1)
    assert (x, y) == pytest.approx((0.3, 1.0))


def test_detect_cliff_is_strict():
    assert detect_cliff(2.0) is False
    assert detect_cliff(100.0) is True
    assert detect_cliff(4.0) is False
    values = np.linspace(0.0, 10.0, 101)
    flags = [detect_cliff(v) for v in values]
    assert flags == sorted(flags)


def test_battery_dots():
    assert battery_dot_level(12.6) == 10
    assert battery_dot_level(0.0) == 0
    assert battery_dot_level(6.3) == 5
    levels = [battery_dot_level(v) for v in np.linspace(0.0, 14.0, 200)]
    assert levels == sorted(levels)
    assert max(levels) == 10
