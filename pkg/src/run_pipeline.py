#!/usr/bin/env python
"""
Solar Panel Cleaner Runner

This script provides a command-line interface to the simulator and the power
design calculators. Each subcommand runs the matching script in ``scripts/``.

Examples:
    python src/run_pipeline.py simulate --scenario src/scenarios/default.json \\
        --trace out/trace.csv --summary out/summary.json
    python src/run_pipeline.py buck-design --vin 18 --vout 12.6 --fsw 260e3 --ripple 0.3
    python src/run_pipeline.py charge-profile --capacity 5 --icc 2 --iterm 0.1 --tau 600 --out out/charge.csv
"""

import logging
import os
import subprocess
import sys

# Add src directory to Python path
src_dir = os.path.dirname(os.path.abspath(__file__))
if src_dir not in sys.path:
    sys.path.append(src_dir)

from utils.config import EXIT_IO, configure_logging, load_settings

logger = logging.getLogger(__name__)

SUBCOMMANDS = {
    "simulate": "simulate_main.py",
    "buck-design": "buck_design_main.py",
    "charge-profile": "charge_profile_main.py",
}

USAGE = "usage: run_pipeline.py {" + ",".join(SUBCOMMANDS) + "} [options]"


def run_script(script_name, args=None, timeout=None):
    """Run a script from ``scripts/`` and return its exit code."""
    script_path = os.path.join(src_dir, "scripts", script_name)
    if not os.path.exists(script_path):
        logger.error(f"Script not found: {script_path}")
        return EXIT_IO

    cmd = [sys.executable, script_path]
    if args:
        cmd.extend(args)
    logger.debug(f"Running command: {' '.join(cmd)}")

    try:
        result = subprocess.run(cmd, timeout=timeout)
    except subprocess.TimeoutExpired:
        logger.error(f"Timeout expired running {script_name} after {timeout} seconds")
        return EXIT_IO
    if result.returncode != 0:
        logger.error(f"{script_name} exited with code {result.returncode}")
    return result.returncode


def main(argv=None):
    """Dispatch a subcommand; everything after it is passed to the script."""
    configure_logging(load_settings())
    argv = sys.argv[1:] if argv is None else list(argv)

    if not argv or argv[0] in ("-h", "--help"):
        print(USAGE)
        print("\nsubcommands:")
        for name, script in SUBCOMMANDS.items():
            print(f"  {name:<16} runs scripts/{script}")
        return 0 if argv else 1

    command, rest = argv[0], argv[1:]
    if command not in SUBCOMMANDS:
        logger.error(f"Unknown subcommand '{command}'")
        print(USAGE)
        return 1
    return run_script(SUBCOMMANDS[command], rest)


if __name__ == "__main__":
    sys.exit(main())
