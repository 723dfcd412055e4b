"""
Sensor models: two accelerometers behind a 10-bit ADC, the downward ultrasonic
ranger used for edge detection, and the dot-mode battery level indicator.

Conversions follow the robot firmware exactly; the physics front-end (gravity
projected onto the sensor axes plus Gaussian count noise) feeds them.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .dynamics import UPSLOPE_HEADING, Pose
from .world import Point, Workspace, region_at

logger = logging.getLogger(__name__)

US_PER_INCH = 74.07
DEFAULT_CLIFF_THRESHOLD_IN = 4.0
DEFAULT_MAX_RANGE_IN = 100.0
FULL_BATTERY_V = 12.6
ADC_DIVISOR = 1024.0


@dataclass(frozen=True)
class AccelConfig:
    sensitivity_v_per_g: float = 0.8
    zero_g_offset_v: float = 1.65
    vref_v: float = 3.3
    adc_full_scale: int = 1023
    noise_sd_counts: float = 2.0
    n_samples: int = 5
    mount_yaw_deg: float = 40.0

    def __post_init__(self):
        if not self.sensitivity_v_per_g > 0 or not self.vref_v > 0:
            raise ValueError("sensitivity_v_per_g and vref_v must be positive")
        if not 0.0 <= self.zero_g_offset_v <= self.vref_v:
            raise ValueError(
                f"zero_g_offset_v must lie in [0, vref_v], got {self.zero_g_offset_v}"
            )
        if self.adc_full_scale < 1:
            raise ValueError(f"adc_full_scale must be >= 1, got {self.adc_full_scale}")
        if self.noise_sd_counts < 0:
            raise ValueError(f"noise_sd_counts must be >= 0, got {self.noise_sd_counts}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")

    @property
    def frame_max(self) -> int:
        return c_round(100.0 * self.vref_v / self.sensitivity_v_per_g)


@dataclass(frozen=True)
class AccelFrame:
    """Reduced axis values in centi-g including the zero-g bias."""

    x1: int
    y1: int
    z1: int


@dataclass(frozen=True)
class PresetValues:
    x1_set_up: int = 218
    x1_set_down: int = 218
    x1_set_turn: int = 217
    y1_set_turn: int = 247
    y1_set_lateral: int = 247
    ascend_polarity: int = 1
    descend_polarity: int = 1
    lateral_polarity: int = 1

    def __post_init__(self):
        for name in ("ascend_polarity", "descend_polarity", "lateral_polarity"):
            if getattr(self, name) not in (-1, 1):
                raise ValueError(f"{name} must be +1 or -1, got {getattr(self, name)}")
        for name in ("x1_set_up", "x1_set_down", "x1_set_turn", "y1_set_turn", "y1_set_lateral"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class UltrasonicReading:
    echo_duration_us: float
    distance_in: float

    @classmethod
    def from_echo(cls, echo_duration_us: float) -> "UltrasonicReading":
        return cls(echo_duration_us, ultra_distance(echo_duration_us))


def c_round(value: float) -> int:
    """Round half away from zero, as the firmware's round() does."""
    return int(math.copysign(math.floor(abs(value) + 0.5), value))


def gravity_components(
    incline_deg: float,
    heading_rad: float,
    mount_yaw_deg: float = 0.0,
) -> Tuple[float, float, float]:
    """Gravity in g along the sensor axes for a robot at ``heading_rad`` on an incline."""
    s = math.sin(math.radians(incline_deg))
    alpha = heading_rad - UPSLOPE_HEADING - math.radians(mount_yaw_deg)
    return (s * math.cos(alpha), s * math.sin(alpha), math.cos(math.radians(incline_deg)))


def _ideal_counts(true_accel_g: Sequence[float], cfg: AccelConfig) -> np.ndarray:
    volts = cfg.zero_g_offset_v + cfg.sensitivity_v_per_g * np.asarray(true_accel_g, dtype=float)
    return volts / cfg.vref_v * cfg.adc_full_scale


def sample_accel_batch(
    true_accel_g: Sequence[float],
    cfg: AccelConfig,
    rng: Optional[np.random.Generator],
    n: int,
) -> np.ndarray:
    """
    ``n`` raw ADC frames from one sensor.

    Args:
        true_accel_g: (a_x, a_y, a_z) in g
        cfg: Accelerometer configuration
        rng: Noise stream; None gives noise-free counts
        n: Number of frames

    Returns:
        Integer array of shape (n, 3) clamped to [0, adc_full_scale]
    """
    ideal = np.broadcast_to(_ideal_counts(true_accel_g, cfg), (n, 3))
    if rng is not None and cfg.noise_sd_counts > 0:
        ideal = ideal + rng.normal(0.0, cfg.noise_sd_counts, size=(n, 3))
    # half away from zero, matching c_round
    counts = np.sign(ideal) * np.floor(np.abs(ideal) + 0.5)
    return np.clip(counts, 0, cfg.adc_full_scale).astype(np.int64)


def sample_accel_counts(
    true_accel_g: Sequence[float],
    cfg: AccelConfig,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[int, int, int]:
    """Single raw ADC frame (x, y, z counts)."""
    frame = sample_accel_batch(true_accel_g, cfg, rng, 1)[0]
    return int(frame[0]), int(frame[1]), int(frame[2])


def accel_reduce(sensor_a, sensor_b, cfg: AccelConfig) -> AccelFrame:
    """
    Average both sensors' samples and convert to centi-g.

    Args:
        sensor_a: n_samples raw frames from the first accelerometer
        sensor_b: n_samples raw frames from the second accelerometer
        cfg: Accelerometer configuration

    Returns:
        AccelFrame of round(100 * (mean/1024 * vref) / sensitivity) per axis
    """
    a = np.asarray(sensor_a, dtype=np.int64)
    b = np.asarray(sensor_b, dtype=np.int64)
    expected = (cfg.n_samples, 3)
    if a.shape != expected or b.shape != expected:
        raise ValueError(
            f"accel_reduce expects {cfg.n_samples} frames of 3 axes per sensor, "
            f"got {a.shape} and {b.shape}"
        )
    totals = a.sum(axis=0) + b.sum(axis=0)
    mean = totals / (2.0 * cfg.n_samples)
    values = [
        c_round(100.0 * ((m / ADC_DIVISOR) * cfg.vref_v) / cfg.sensitivity_v_per_g) for m in mean
    ]
    return AccelFrame(*values)


def expected_frame(cfg: AccelConfig, incline_deg: float, heading_rad: float) -> AccelFrame:
    """Noise-free reduced frame for a pose."""
    g = gravity_components(incline_deg, heading_rad, cfg.mount_yaw_deg)
    block = sample_accel_batch(g, cfg, None, cfg.n_samples)
    return accel_reduce(block, block, cfg)


def axis_slope(cfg: AccelConfig, incline_deg: float, heading_rad: float, axis: str) -> float:
    """d(a_axis)/d(heading) in g per radian."""
    s = math.sin(math.radians(incline_deg))
    alpha = heading_rad - UPSLOPE_HEADING - math.radians(cfg.mount_yaw_deg)
    if axis == "x":
        return -s * math.sin(alpha)
    return s * math.cos(alpha)


def _polarity(slope: float) -> int:
    return -1 if slope < 0 else 1


def derive_presets(
    cfg: AccelConfig,
    incline_deg: float,
    lateral_heading: float = 0.0,
) -> PresetValues:
    """
    Presets consistent with the mounting and the incline.

    Each straight-drive preset is the noise-free reading at the target heading. The
    polarity makes the steering error grow as the robot yaws counter-clockwise, so a
    positive error always steers clockwise.
    """
    up = expected_frame(cfg, incline_deg, UPSLOPE_HEADING)
    down = expected_frame(cfg, incline_deg, -UPSLOPE_HEADING)
    lateral = expected_frame(cfg, incline_deg, lateral_heading)
    presets = PresetValues(
        x1_set_up=up.x1,
        x1_set_down=down.x1,
        x1_set_turn=lateral.x1,
        y1_set_turn=up.y1,
        y1_set_lateral=lateral.y1,
        ascend_polarity=_polarity(axis_slope(cfg, incline_deg, UPSLOPE_HEADING, "x")),
        descend_polarity=_polarity(axis_slope(cfg, incline_deg, -UPSLOPE_HEADING, "x")),
        lateral_polarity=_polarity(axis_slope(cfg, incline_deg, lateral_heading, "y")),
    )
    logger.debug(f"Derived presets for incline {incline_deg:.1f} deg: {presets}")
    return presets


def ultra_distance(echo_duration_us: float) -> float:
    """Echo round-trip time in microseconds to distance in inches."""
    if echo_duration_us < 0:
        raise ValueError(f"echo duration must be >= 0, got {echo_duration_us}")
    return (echo_duration_us / 2.0) / US_PER_INCH


def echo_duration_for(distance_in: float) -> float:
    return distance_in * 2.0 * US_PER_INCH


def look_down_point(pose: Pose, lookahead_m: float) -> Point:
    return (
        pose.x_m + lookahead_m * math.cos(pose.heading_rad),
        pose.y_m + lookahead_m * math.sin(pose.heading_rad),
    )


def simulate_echo(
    sensor_point: Point,
    ws: Workspace,
    mount_height_in: float = 2.0,
    max_range_in: float = DEFAULT_MAX_RANGE_IN,
) -> float:
    """Echo duration seen by the ranger: the mount height over the surface, max range past an edge."""
    if mount_height_in < 0:
        raise ValueError(f"mount_height_in must be >= 0, got {mount_height_in}")
    if region_at(ws, sensor_point) is None:
        return echo_duration_for(max_range_in)
    return echo_duration_for(mount_height_in)


def detect_cliff(distance_in: float, threshold_in: float = DEFAULT_CLIFF_THRESHOLD_IN) -> bool:
    if distance_in < 0:
        raise ValueError(f"distance must be >= 0, got {distance_in}")
    return distance_in > threshold_in


def battery_dot_level(v: float, full_v: float = FULL_BATTERY_V) -> int:
    """Number of lit dots (0..10) on the battery indicator calibrated to ``full_v``."""
    if v < 0:
        raise ValueError(f"battery voltage must be >= 0, got {v}")
    level = math.floor(10.0 * v / full_v + 1e-9)
    return max(0, min(10, level))
