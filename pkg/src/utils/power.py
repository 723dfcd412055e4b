"""
Battery and power electronics: an affine open-circuit battery model, the two-stage
CC/CV charger with current cutoff, the load ledger and the buck converter design
equations used to size the on-board regulators.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

import pandas as pd

logger = logging.getLogger(__name__)

DEFAULT_F_SW_HZ = 260e3
CORNER_RATIO = 50.0
PROFILE_COLUMNS = ["t_s", "phase", "terminal_v", "current_a", "soc"]


class ChargePhase(Enum):
    CC = "CC"
    CV = "CV"
    DONE = "Done"


@dataclass(frozen=True)
class BatteryModel:
    capacity_ah: float = 5.0
    soc: float = 1.0
    v_full: float = 12.6
    v_empty: float = 9.0

    def __post_init__(self):
        if not self.capacity_ah > 0:
            raise ValueError(f"capacity_ah must be positive, got {self.capacity_ah}")
        if not 0.0 <= self.soc <= 1.0:
            raise ValueError(f"soc must lie in [0, 1], got {self.soc}")
        if not self.v_empty < self.v_full:
            raise ValueError(f"v_empty ({self.v_empty}) must be below v_full ({self.v_full})")

    @property
    def terminal_v(self) -> float:
        return self.v_empty + (self.v_full - self.v_empty) * self.soc


@dataclass(frozen=True)
class ChargerConfig:
    i_cc: float = 2.0
    v_cv: float = 12.6
    i_term: float = 0.1
    cv_tau_s: float = 600.0

    def __post_init__(self):
        for name in ("i_cc", "v_cv", "i_term", "cv_tau_s"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.i_term < self.i_cc:
            raise ValueError(f"i_term ({self.i_term}) must be below i_cc ({self.i_cc})")


@dataclass(frozen=True)
class LoadLedger:
    drive_w_per_duty: float = 6.0
    brush_w: float = 6.0
    vacuum_w: float = 250.0
    idle_w: float = 1.5

    def __post_init__(self):
        for name in ("drive_w_per_duty", "brush_w", "vacuum_w", "idle_w"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")

    def total_w(self, duty_left: int, duty_right: int, vacuum_on: bool) -> float:
        """Electrical load for one tick; vacuum and brush share one switch."""
        drive = self.drive_w_per_duty * (abs(duty_left) + abs(duty_right)) / 1000.0
        cleaning = self.vacuum_w + self.brush_w if vacuum_on else 0.0
        return self.idle_w + drive + cleaning


@dataclass(frozen=True)
class BuckDesign:
    v_in: float
    v_out: float
    duty_d: float
    f_sw: float
    delta_i: float
    l_h: float
    c_f: float

    @property
    def corner_hz(self) -> float:
        return lc_corner_frequency(self.l_h, self.c_f)


def discharge_step(batt: BatteryModel, loads_w: float, dt: float) -> BatteryModel:
    """Draw ``loads_w`` for ``dt`` seconds at the present terminal voltage; soc floors at 0."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if loads_w < 0:
        raise ValueError(f"loads must be >= 0, got {loads_w}")
    if loads_w == 0:
        return batt
    current = loads_w / batt.terminal_v
    soc = batt.soc - current * dt / 3600.0 / batt.capacity_ah
    if soc <= 0.0 and batt.soc > 0.0:
        logger.warning("Battery fully discharged")
    return replace(batt, soc=max(0.0, soc))


def charge_step(
    batt: BatteryModel,
    cfg: ChargerConfig,
    phase: ChargePhase,
    dt: float,
    t_cv_s: float = 0.0,
) -> Tuple[BatteryModel, float, ChargePhase]:
    """
    One charger step.

    Args:
        batt: Battery state
        cfg: Charger configuration
        phase: Current phase
        dt: Step length in seconds
        t_cv_s: Time already spent in CV

    Returns:
        (battery, current in A during the step, phase for the next step)
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if abs(cfg.v_cv - batt.v_full) > 1e-9:
        raise ValueError(f"charger v_cv ({cfg.v_cv}) must equal battery v_full ({batt.v_full})")

    if phase is ChargePhase.DONE:
        return batt, 0.0, ChargePhase.DONE

    if phase is ChargePhase.CC:
        current = cfg.i_cc
        charged = _integrate(batt, current, dt)
        next_phase = ChargePhase.CV if charged.terminal_v >= cfg.v_cv - 1e-12 else ChargePhase.CC
        return charged, current, next_phase

    current = cfg.i_cc * math.exp(-t_cv_s / cfg.cv_tau_s)
    if current < cfg.i_term:
        logger.info(f"Charge current {current:.3f} A below cutoff, disconnecting")
        return batt, 0.0, ChargePhase.DONE
    return _integrate(batt, current, dt), current, ChargePhase.CV


def _integrate(batt: BatteryModel, current: float, dt: float) -> BatteryModel:
    soc = min(1.0, batt.soc + current * dt / 3600.0 / batt.capacity_ah)
    return replace(batt, soc=soc)


def charge_profile(
    batt: BatteryModel,
    cfg: ChargerConfig,
    dt: float = 1.0,
    max_duration_s: float = 72 * 3600.0,
) -> pd.DataFrame:
    """
    Charge until the charger disconnects.

    Each row holds the state at the start of a step and the current during it; the
    last row is the Done row.

    Returns:
        DataFrame with columns t_s, phase, terminal_v, current_a, soc
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    rows = []
    phase = ChargePhase.CC
    cv_start_step: Optional[int] = None
    max_steps = int(math.ceil(max_duration_s / dt))
    for k in range(max_steps + 1):
        t = k * dt
        t_cv = 0.0 if cv_start_step is None else (k - cv_start_step) * dt
        new_batt, current, next_phase = charge_step(batt, cfg, phase, dt, t_cv)
        if next_phase is ChargePhase.DONE:
            rows.append((t, ChargePhase.DONE.value, batt.terminal_v, 0.0, batt.soc))
            break
        rows.append((t, phase.value, batt.terminal_v, current, batt.soc))
        if phase is ChargePhase.CC and next_phase is ChargePhase.CV:
            cv_start_step = k + 1
        batt, phase = new_batt, next_phase
    else:
        logger.warning(f"Charge did not finish within {max_duration_s:.0f} s")
    return pd.DataFrame(rows, columns=PROFILE_COLUMNS)


def cv_duration_s(profile: pd.DataFrame) -> Optional[float]:
    """Seconds from CV entry to the Done row, or None when either is missing."""
    cv = profile.loc[profile["phase"] == ChargePhase.CV.value, "t_s"]
    done = profile.loc[profile["phase"] == ChargePhase.DONE.value, "t_s"]
    if cv.empty or done.empty:
        return None
    return float(done.iloc[0] - cv.iloc[0])


def buck_inductance(v_in: float, v_out: float, duty_d: float, f_sw: float, delta_i: float) -> float:
    """
    Inductance for a buck stage: L = ((v_in - v_out) * D) / (f_sw * 2 * delta_i).

    Args:
        v_in: Input voltage (the panel side)
        v_out: Regulated output voltage
        duty_d: Duty cycle in (0, 1]
        f_sw: Switching frequency in Hz
        delta_i: Ripple current in A

    Returns:
        Inductance in henries
    """
    if not v_out > 0:
        raise ValueError(f"v_out must be positive, got {v_out}")
    if v_in < v_out:
        raise ValueError(f"v_in ({v_in}) must be >= v_out ({v_out})")
    if not 0.0 < duty_d <= 1.0:
        raise ValueError(f"duty_d must lie in (0, 1], got {duty_d}")
    if not f_sw > 0 or not delta_i > 0:
        raise ValueError(f"f_sw and delta_i must be positive, got {f_sw}, {delta_i}")
    return ((v_in - v_out) * duty_d) / (f_sw * 2.0 * delta_i)


def lc_corner_frequency(l_h: float, c_f: float) -> float:
    if not l_h > 0 or not c_f > 0:
        raise ValueError(f"l_h and c_f must be positive, got {l_h}, {c_f}")
    return 1.0 / (2.0 * math.pi * math.sqrt(l_h * c_f))


def filter_capacitance(l_h: float, f_target: float) -> float:
    if not l_h > 0 or not f_target > 0:
        raise ValueError(f"l_h and f_target must be positive, got {l_h}, {f_target}")
    return 1.0 / ((2.0 * math.pi * f_target) ** 2 * l_h)


def design_buck(
    v_in: float,
    v_out: float,
    f_sw: float = DEFAULT_F_SW_HZ,
    ripple_a: float = 0.3,
    corner_hz: Optional[float] = None,
) -> BuckDesign:
    """Size L from the ripple target and C for an output filter corner (default f_sw/50)."""
    if not v_in > 0:
        raise ValueError(f"v_in must be positive, got {v_in}")
    duty = v_out / v_in
    l_h = buck_inductance(v_in, v_out, duty, f_sw, ripple_a)
    if l_h == 0:
        raise ValueError("v_in equals v_out: no inductor is needed and no filter can be sized")
    corner = f_sw / CORNER_RATIO if corner_hz is None else corner_hz
    c_f = filter_capacitance(l_h, corner)
    return BuckDesign(v_in, v_out, duty, f_sw, ripple_a, l_h, c_f)
