#!/usr/bin/env python3
"""Produce the phase-diagram artifacts: a simulated near-critical sweep and a
wide classification-only sweep at (n, p) = (3, 2).

Outputs land in --out (default results/phase_diagram): per-run records under
runs/, sweep.csv, summary.json.  The CSVs feed the standalone plots tool.
"""

import argparse
from pathlib import Path

from pcrit.problem import ForcingSpec, InitialDataSpec, ProblemSpec
from pcrit.solver import RadialGrid, SolverConfig
from pcrit.sweep import SweepPlan, emit_report, run_sweep, write_outputs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/phase_diagram")
    ap.add_argument("--classification-only", action="store_true",
                    help="skip simulations everywhere (fast, prediction-only)")
    args = ap.parse_args()
    out = Path(args.out)

    # near-critical simulated grid: amplitude-3 Gaussian data blows up quickly
    # on the nonexistence side; the lone supercritical corner sits above the
    # small-data basin and is expected to disagree (it hugs both critical lines)
    simulated = SweepPlan.make(
        alphas=[2.7, 2.8, 2.9, 3.0, 3.15],
        betas=[1.35, 1.4, 1.45, 1.5, 1.575],
        template=ProblemSpec(n=3, p=2.0, lam=1.0, mu=1.0, alpha=3.0, beta=1.5,
                             forcing=ForcingSpec.gaussian(3.0, 1.0),
                             initial=InitialDataSpec.gaussian(3.0, 1.0)),
        grid=RadialGrid(R=40.0, N=64),
        config=SolverConfig(t_max=20.0),
        classification_only=args.classification_only,
        output_dir=str(out / "simulated"))
    records = run_sweep(simulated)
    write_outputs(records, out / "simulated")
    _, summary = emit_report(records)
    print(f"simulated sweep: {summary['agree']} agree / {summary['disagree']} disagree "
          f"/ {summary['inconclusive']} inconclusive of {summary['total']}")

    wide = SweepPlan.make(
        alphas=[2.0, 2.5, 3.0, 3.5, 4.0],
        betas=[1.2, 1.35, 1.5, 2.25, 3.0],
        template=ProblemSpec(n=3, p=2.0, lam=1.0, mu=1.0, alpha=3.0, beta=1.5,
                             forcing=ForcingSpec.gaussian(1.0, 1.0,
                                                          sign="positive-integral"),
                             initial=InitialDataSpec.gaussian(1.0, 1.0)),
        grid=RadialGrid(R=40.0, N=64),
        config=SolverConfig(t_max=20.0),
        classification_only=True,
        output_dir=str(out / "classified"))
    records = run_sweep(wide)
    write_outputs(records, out / "classified")
    print(f"classification-only sweep: {len(records)} records")
    print(f"artifacts under {out}/")


if __name__ == "__main__":
    main()
