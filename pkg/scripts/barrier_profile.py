#!/usr/bin/env python3
"""Certify the stationary barrier for one instance and dump its radial profile."""

import argparse
import json
from pathlib import Path

from pcrit.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/barrier")
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--alpha", type=float, default=4.0)
    ap.add_argument("--beta", type=float, default=3.0)
    ap.add_argument("--m", type=float, default=0.4)
    ap.add_argument("--r", type=float, default=None)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    argv = ["supersolution", "-n", str(args.n), "-p", str(args.p),
            "--alpha", str(args.alpha), "--beta", str(args.beta), "--m", str(args.m),
            "--csv", str(out / "barrier_profile.csv"), "--json"]
    if args.r is not None:
        argv += ["--r", str(args.r)]
    status = cli_main(argv)
    raise SystemExit(status)


if __name__ == "__main__":
    main()
