"""
Offline plots of a finished run: the sensor/motor trace and the remaining dust map.
"""

import logging
import os
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
import seaborn as sns  # noqa: E402

from .world import CoverageGrid  # noqa: E402

logger = logging.getLogger(__name__)


def plot_trace(trace: pd.DataFrame, output_path: Union[str, Path]) -> str:
    """
    Plot ultrasonic distance and accelerometer outputs against the motor inputs.

    Args:
        trace: Trace table as produced by results_tracker.trace_to_frame
        output_path: PNG file to write

    Returns:
        The written path
    """
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(12, 8))
    t = trace["t_s"]

    ax1.plot(t, trace["ultra_in"], color="tab:purple", label="Ultrasonic (in)")
    ax1.set_ylabel("Distance (in)")
    ax1.set_title("Ultrasonic sensor & motor inputs vs time")
    duty1 = ax1.twinx()
    duty1.plot(t, trace["duty_left"], color="tab:blue", alpha=0.6, label="Left duty")
    duty1.plot(t, trace["duty_right"], color="tab:orange", alpha=0.6, label="Right duty")
    duty1.set_ylabel("Duty")
    ax1.legend(loc="upper left")
    duty1.legend(loc="upper right")

    ax2.plot(t, trace["accel_x"], color="tab:green", label="Accel X")
    ax2.plot(t, trace["accel_y"], color="tab:red", label="Accel Y")
    ax2.set_ylabel("Centi-g")
    ax2.set_xlabel("Time (s)")
    ax2.set_title("Accelerometer outputs & motor inputs vs time")
    duty2 = ax2.twinx()
    duty2.plot(t, trace["duty_left"], color="tab:blue", alpha=0.4)
    duty2.plot(t, trace["duty_right"], color="tab:orange", alpha=0.4)
    duty2.set_ylabel("Duty")
    ax2.legend(loc="upper left")

    plt.tight_layout()
    _save(fig, output_path)
    return str(output_path)


def plot_coverage(grid: CoverageGrid, output_path: Union[str, Path]) -> str:
    """Heat map of remaining dust; off-panel cells are masked out."""
    dust = np.flipud(grid.dust)
    fig = plt.figure(figsize=(8, 8))
    sns.heatmap(
        dust,
        mask=np.isnan(dust),
        cmap="YlOrBr",
        vmin=0.0,
        vmax=1.0,
        xticklabels=False,
        yticklabels=False,
        cbar_kws={"label": "Dust fraction"},
    )
    plt.title("Remaining dust")
    plt.xlabel("x (lateral)")
    plt.ylabel("y (up-slope)")
    plt.tight_layout()
    _save(fig, output_path)
    return str(output_path)


def _save(fig, output_path: Union[str, Path]) -> None:
    directory = os.path.dirname(str(output_path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    try:
        fig.savefig(output_path, dpi=100)
    finally:
        plt.close(fig)
    logger.info(f"Plot saved to {output_path}")
