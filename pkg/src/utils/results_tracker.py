"""
Utility for writing run results: the per-tick trace CSV, the run summary JSON and
the state transition log.
"""

import json
import logging
import os
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .scenario import to_plain

logger = logging.getLogger(__name__)

TRACE_COLUMNS = [
    "t_s", "state", "ultra_in", "duty_left", "duty_right", "accel_x", "accel_y",
    "battery_v", "x_m", "y_m", "heading_rad", "vacuum_on",
]
EVENT_COLUMNS = ["t_s", "from_state", "to_state", "column_index"]
FLOAT_FORMAT = "%.6g"


class OutputError(OSError):
    """A result file could not be written."""

    def __init__(self, path: Union[str, Path], reason: str):
        super().__init__(f"cannot write {path}: {reason}")
        self.path = str(path)


def _serialize_for_json(obj: Any) -> Any:
    """
    Convert numpy scalars and arrays to standard Python types for JSON serialization.

    Args:
        obj: Object to serialize

    Returns:
        JSON serializable version of the object
    """
    if isinstance(obj, np.integer):
        return int(obj)
    elif isinstance(obj, np.floating):
        return float(obj)
    elif isinstance(obj, np.ndarray):
        return obj.tolist()
    elif obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


def _convert_to_serializable(data: Any) -> Any:
    """
    Recursively convert all values in a nested structure to JSON serializable types.

    Args:
        data: Data structure to convert

    Returns:
        JSON serializable version of the data structure
    """
    if isinstance(data, dict):
        return {k: _convert_to_serializable(v) for k, v in data.items()}
    elif isinstance(data, (list, tuple)):
        return [_convert_to_serializable(item) for item in data]
    return _serialize_for_json(data)


def _format_metric(value):
    """Format a summary value for log output."""
    if isinstance(value, float):
        return f"{value:.4f}"
    return value


def trace_to_frame(trace: Sequence[Any]) -> pd.DataFrame:
    """Trace rows as a DataFrame with the trace columns in order; vacuum_on as 0/1."""
    if len(trace) == 0:
        raise ValueError("trace is empty")
    frame = pd.DataFrame([asdict(row) for row in trace], columns=TRACE_COLUMNS)
    frame["vacuum_on"] = frame["vacuum_on"].astype(int)
    return frame


def _frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def emit_trace_csv(trace: Sequence[Any]) -> str:
    """
    Render the trace as CSV text.

    Args:
        trace: Non-empty sequence of TraceRow

    Returns:
        Header line plus one line per row, numbers with 6 significant digits
    """
    return _frame_to_csv(trace_to_frame(trace))


def emit_events_csv(events: Sequence[Any]) -> str:
    frame = pd.DataFrame([asdict(e) for e in events], columns=EVENT_COLUMNS)
    return _frame_to_csv(frame)


def emit_table_csv(frame: pd.DataFrame) -> str:
    return _frame_to_csv(frame)


def emit_summary(summary: Any) -> str:
    """Run summary as a flat JSON object."""
    data = summary if isinstance(summary, dict) else asdict(summary)
    return json.dumps(_convert_to_serializable(data), indent=2) + "\n"


def emit_scenario(scenario: Any) -> str:
    """The effective scenario of a run, in the same JSON layout the loader accepts."""
    return json.dumps(_convert_to_serializable(to_plain(scenario)), indent=2) + "\n"


def write_text(path: Union[str, Path], text: str) -> str:
    """
    Write ``text`` to ``path``, creating parent directories.

    Raises:
        OutputError: the file could not be written
    """
    path = Path(path)
    try:
        if path.parent and not path.parent.exists():
            os.makedirs(path.parent, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(text)
    except OSError as exc:
        raise OutputError(path, exc.strerror or str(exc)) from exc
    logger.info(f"Results saved to {path}")
    return str(path)


def save_run_outputs(
    result: Any,
    trace_path: Union[str, Path],
    summary_path: Union[str, Path],
    events_path: Optional[Union[str, Path]] = None,
    scenario_path: Optional[Union[str, Path]] = None,
) -> List[str]:
    """Write the trace, the summary and optionally the event log and effective scenario of a run."""
    written = [
        write_text(trace_path, emit_trace_csv(result.trace)),
        write_text(summary_path, emit_summary(result.summary)),
    ]
    if events_path is not None:
        written.append(write_text(events_path, emit_events_csv(result.events)))
    if scenario_path is not None and result.scenario is not None:
        written.append(write_text(scenario_path, emit_scenario(result.scenario)))
    return written


def summary_lines(summary: Any) -> List[str]:
    """Human-readable ``key: value`` lines for logging."""
    data: Dict[str, Any] = summary if isinstance(summary, dict) else asdict(summary)
    return [f"{key}: {_format_metric(value)}" for key, value in data.items()]
