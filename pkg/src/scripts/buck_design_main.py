"""
Size the inductor and output capacitor of a buck regulator stage.
"""

import argparse
import json
import logging
import os
import sys

src_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if src_dir not in sys.path:
    sys.path.append(src_dir)

from utils.config import EXIT_IO, EXIT_OK, EXIT_VALIDATION, configure_logging, load_settings
from utils.power import DEFAULT_F_SW_HZ, design_buck
from utils.results_tracker import write_text

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Buck converter L/C design calculator")
    parser.add_argument("--vin", type=float, required=True, help="Input voltage (V)")
    parser.add_argument("--vout", type=float, required=True, help="Output voltage (V)")
    parser.add_argument("--fsw", type=float, default=DEFAULT_F_SW_HZ, help="Switching frequency (Hz)")
    parser.add_argument("--ripple", type=float, default=0.3, help="Ripple current (A)")
    parser.add_argument("--corner-hz", type=float, default=None,
                        help="Output filter corner frequency (default: fsw/50)")
    parser.add_argument("--out", type=str, default=None, help="Write the design as JSON")
    return parser


def main(argv=None) -> int:
    configure_logging(load_settings())
    args = build_parser().parse_args(argv)

    try:
        design = design_buck(args.vin, args.vout, args.fsw, args.ripple, args.corner_hz)
        report = {
            "v_in": design.v_in,
            "v_out": design.v_out,
            "duty": design.duty_d,
            "f_sw_hz": design.f_sw,
            "ripple_a": design.delta_i,
            "inductance_h": design.l_h,
            "capacitance_f": design.c_f,
            "corner_hz": design.corner_hz,
        }
        if args.out:
            write_text(args.out, json.dumps(report, indent=2) + "\n")
    except ValueError as e:
        logger.error(f"Validation error: {e}")
        return EXIT_VALIDATION
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO

    print(f"duty: {design.duty_d:.4f}")
    print(f"L: {design.l_h * 1e6:.2f} uH")
    print(f"C: {design.c_f * 1e6:.2f} uF")
    print(f"corner: {design.corner_hz:.1f} Hz")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
