"""Entry point: plots <kind> --in <csv> --out <png> [options]."""

from __future__ import annotations

import argparse
import sys

from .render import PlotJob, render
from .schema import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plots",
                                     description="render pcrit CSV artifacts")
    parser.add_argument("kind", choices=("phase_diagram", "scaling", "barrier_profile"))
    parser.add_argument("--in", dest="input_csv", required=True)
    parser.add_argument("--out", dest="output_image", required=True)
    parser.add_argument("--alpha-cr", type=float, default=None,
                        help="dashed vertical threshold (else summary.json is probed)")
    parser.add_argument("--beta-cr", type=float, default=None,
                        help="dashed horizontal threshold")
    parser.add_argument("--ref-slope", type=float, default=None,
                        help="scaling: reference slope line")
    parser.add_argument("--x-loglnT", action="store_true",
                        help="scaling: plot against ln T (logarithmic variant)")
    parser.add_argument("--title", default="")
    parser.add_argument("--xlabel", default="")
    parser.add_argument("--ylabel", default="")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = PlotJob(input_csv=args.input_csv, kind=args.kind,
                  output_image=args.output_image, alpha_cr=args.alpha_cr,
                  beta_cr=args.beta_cr, ref_slope=args.ref_slope,
                  x_loglnT=args.x_loglnT, title=args.title,
                  xlabel=args.xlabel, ylabel=args.ylabel)
    try:
        result = render(job)
    except SchemaError as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if job.kind == "scaling" and result.get("slopes"):
        slopes = ", ".join(f"{k} {v:.4f}" for k, v in result["slopes"].items())
        print(f"fitted slopes: {slopes}")
    print(f"wrote {job.output_image}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
