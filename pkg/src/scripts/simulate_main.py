"""
Run one cleaning mission from a scenario file and write the trace and summary.
"""

import argparse
import logging
import os
import sys

# Add src directory to path
src_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if src_dir not in sys.path:
    sys.path.append(src_dir)

from utils.config import EXIT_IO, EXIT_OK, EXIT_VALIDATION, configure_logging, load_settings
from utils.engine import run_from_file
from utils.plots import plot_coverage, plot_trace
from utils.results_tracker import save_run_outputs, summary_lines, trace_to_frame

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Simulate the solar panel cleaning robot")
    parser.add_argument("--scenario", type=str, default=None,
                        help="Scenario JSON file (default: SOLAR_CLEANER_DEFAULT_SCENARIO)")
    parser.add_argument("--trace", type=str, required=True, help="Trace CSV output path")
    parser.add_argument("--summary", type=str, required=True, help="Summary JSON output path")
    parser.add_argument("--seed", type=int, default=None, help="Override the scenario seed")
    parser.add_argument("--max-sim-s", type=float, default=None,
                        help="Override the simulated time limit in seconds")
    parser.add_argument("--events", type=str, default=None, help="State transition CSV output path")
    parser.add_argument("--scenario-out", type=str, default=None,
                        help="Write the effective scenario (after overrides) as JSON")
    parser.add_argument("--plot-dir", type=str, default=None,
                        help="Directory for the trace and coverage figures")
    return parser


def main(argv=None) -> int:
    settings = load_settings()
    configure_logging(settings)
    args = build_parser().parse_args(argv)
    scenario_path = args.scenario or str(settings.default_scenario)

    try:
        result = run_from_file(
            scenario_path, seed=args.seed, max_sim_s=args.max_sim_s, progress=settings.progress
        )
        save_run_outputs(result, args.trace, args.summary, args.events, args.scenario_out)
        if args.plot_dir:
            plot_trace(trace_to_frame(result.trace), os.path.join(args.plot_dir, "trace.png"))
            plot_coverage(result.grid, os.path.join(args.plot_dir, "coverage.png"))
    except ValueError as e:
        logger.error(f"Validation error: {e}")
        return EXIT_VALIDATION
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO

    logger.info("Run summary:")
    for line in summary_lines(result.summary):
        logger.info(f"  {line}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
