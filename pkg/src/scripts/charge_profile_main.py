"""
Tabulate a CC/CV charge from a given state of charge until the charger disconnects.
"""

import argparse
import logging
import os
import sys

src_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if src_dir not in sys.path:
    sys.path.append(src_dir)

from utils.config import EXIT_IO, EXIT_OK, EXIT_VALIDATION, configure_logging, load_settings
from utils.power import BatteryModel, ChargerConfig, charge_profile, cv_duration_s
from utils.results_tracker import emit_table_csv, write_text

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="CC/CV battery charge profile")
    parser.add_argument("--capacity", type=float, required=True, help="Battery capacity (Ah)")
    parser.add_argument("--icc", type=float, required=True, help="Constant-current stage current (A)")
    parser.add_argument("--iterm", type=float, required=True, help="Termination current (A)")
    parser.add_argument("--tau", type=float, required=True, help="CV current decay time constant (s)")
    parser.add_argument("--out", type=str, required=True, help="Profile CSV output path")
    parser.add_argument("--soc0", type=float, default=0.1, help="Initial state of charge")
    parser.add_argument("--dt", type=float, default=1.0, help="Time step (s)")
    parser.add_argument("--v-empty", type=float, default=9.0, help="Open-circuit voltage at empty (V)")
    parser.add_argument("--v-full", type=float, default=12.6, help="Open-circuit voltage at full (V)")
    return parser


def main(argv=None) -> int:
    configure_logging(load_settings())
    args = build_parser().parse_args(argv)

    try:
        battery = BatteryModel(
            capacity_ah=args.capacity, soc=args.soc0, v_full=args.v_full, v_empty=args.v_empty
        )
        charger = ChargerConfig(i_cc=args.icc, v_cv=args.v_full, i_term=args.iterm, cv_tau_s=args.tau)
        profile = charge_profile(battery, charger, dt=args.dt)
        write_text(args.out, emit_table_csv(profile))
    except ValueError as e:
        logger.error(f"Validation error: {e}")
        return EXIT_VALIDATION
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO

    cv_s = cv_duration_s(profile)
    logger.info(f"Charge finished at t={profile['t_s'].iloc[-1]:.0f} s ({len(profile)} rows)")
    if cv_s is not None:
        logger.info(f"CV phase lasted {cv_s:.0f} s")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
