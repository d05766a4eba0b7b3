"""Single entry point: classify, supersolution, testfn, simulate, sweep, report.

Config-file values (--config, a JSON object keyed by argparse destinations)
are overridden by explicit command-line flags.  Every subcommand prints a
human summary; --json appends one machine-readable JSON document as the last
line.  Exit status: 0 success, 1 numeric/validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import barrier, exponents, sweep as sweep_mod, testfuncs
from .problem import (ForcingSpec, InitialDataSpec, ProblemSpec, spec_to_dict,
                      validate_spec)
from .solver import RadialGrid, SolverConfig, run


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    return obj


def _emit_json(payload: dict) -> None:
    print(json.dumps(_jsonable(payload)))


def _build_forcing(args, spec_exponents) -> ForcingSpec:
    kind = getattr(args, "forcing", "gaussian")
    sign = getattr(args, "forcing_sign", "strictly-positive")
    if kind == "zero":
        return ForcingSpec.zero()
    if kind == "gaussian":
        return ForcingSpec.gaussian(args.forcing_amplitude, args.forcing_width, sign=sign)
    if kind == "power-tail":
        return ForcingSpec.power_tail(args.forcing_amplitude, args.forcing_exponent,
                                      args.forcing_r0, sign=sign)
    if kind == "barrier-residual":
        params = _barrier_params(args, spec_exponents)
        return ForcingSpec.residual(params, sign=sign)
    raise ValueError(f"unknown forcing kind {kind!r}")


def _build_initial(args, spec_exponents) -> InitialDataSpec:
    kind = getattr(args, "initial", "gaussian")
    if kind == "constant":
        return InitialDataSpec.constant(args.initial_amplitude)
    if kind == "gaussian":
        return InitialDataSpec.gaussian(args.initial_amplitude, args.initial_width)
    if kind == "barrier-fraction":
        params = _barrier_params(args, spec_exponents)
        return InitialDataSpec.barrier_fraction(args.initial_fraction, params)
    raise ValueError(f"unknown initial kind {kind!r}")


def _barrier_params(args, spec_exponents) -> barrier.SupersolutionParams:
    n, p, alpha, beta, lam, mu = spec_exponents
    m = getattr(args, "m", None)
    if m is None:
        window = barrier.admissible_m_range(n, p, alpha, beta, r=getattr(args, "r", None))
        if window is None:
            raise ValueError("admissible m-window is empty for these exponents")
        m = 0.5 * (window[0] + window[1])
    eps = getattr(args, "epsilon", None)
    if eps is None:
        safety = getattr(args, "safety", 0.9)
        eps = safety * barrier.epsilon_star(n, p, alpha, beta, m, lam, mu)
    return barrier.SupersolutionParams(n=n, p=p, alpha=alpha, beta=beta, lam=lam, mu=mu,
                                       m=float(m), epsilon=float(eps),
                                       r=getattr(args, "r", None))


def cmd_classify(args) -> int:
    spec = ProblemSpec(n=args.n, p=args.p, lam=args.lam, mu=args.mu,
                       alpha=args.alpha, beta=args.beta,
                       forcing=_build_forcing(args, None),
                       initial=InitialDataSpec.gaussian(1.0, 1.0))
    pred = exponents.classify(spec, r=args.r)
    flags = ", ".join(pred.critical_flags) or "none"
    print(f"verdict: {pred.verdict}" + (f"  [clause {pred.clause}]" if pred.clause else ""))
    print(f"alpha_cr = {pred.alpha_cr}, beta_cr = {pred.beta_cr}, r* = {pred.r_star}")
    print(f"critical flags: {flags}")
    if pred.detail:
        print(f"detail: {pred.detail}")
    if args.json:
        _emit_json(pred.to_dict())
    return 0


def cmd_supersolution(args) -> int:
    params = _barrier_params(args, (args.n, args.p, args.alpha, args.beta, args.lam, args.mu))
    grid = barrier.default_certification_grid(r_max=args.grid_max, points=args.grid_points)
    try:
        cert = barrier.certify(params, grid=grid, r=args.r, safety=args.safety)
    except barrier.CertificationError as exc:
        print(f"certification refused: {exc} (eps* = {exc.epsilon_star})", file=sys.stderr)
        return 1
    print(f"certificate {'OK' if cert.ok else 'FAILED'}: m = {params.m}, "
          f"epsilon = {params.epsilon}, eps* = {cert.epsilon_star}")
    print(f"M_eps = {cert.m_epsilon}, residual_min = {cert.residual_min}, "
          f"margin_min = {cert.margin_min}")
    if cert.decay is not None:
        print(f"decay: f <= {cert.decay.constant} * radius^-{cert.decay.r} beyond "
              f"radius {cert.decay.inner_radius}")
    if args.csv:
        prof = barrier.barrier_profile(params, grid)
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["radius", "v", "grad_norm", "p_laplacian", "residual"])
            for i in range(grid.size):
                writer.writerow([repr(float(grid[i])), repr(float(prof["v"][i])),
                                 repr(float(prof["grad_norm"][i])),
                                 repr(float(prof["p_laplacian"][i])),
                                 repr(float(prof["residual"][i]))])
        print(f"profile CSV written to {args.csv}")
    if args.json:
        _emit_json(cert.to_dict())
    return 0 if cert.ok else 1


def cmd_testfn(args) -> int:
    if args.variant == "power":
        spec = testfuncs.power_spec(args.alpha, args.beta, args.p, kappa=args.kappa)
    else:
        theta = args.theta if args.theta is not None \
            else 0.5 * testfuncs.max_theta(args.alpha, args.n)
        spec = testfuncs.log_spec(args.alpha, args.beta, args.p, theta=theta)
    forcing = None
    if args.forcing != "zero":
        forcing = _build_forcing(args, None)
    rows = []
    for T in args.T:
        vals = testfuncs.rescaled_integrals(spec, args.n, T, forcing=forcing)
        rows.append((T, vals))
        print(f"T = {T:g}: I1 = {vals.I1:.6e}, I2 = {vals.I2:.6e}, "
              f"F = {vals.F:.6e}, U0 = {vals.U0:.6e}")
    summary = {"variant": args.variant, "n": args.n, "p": args.p,
               "alpha": args.alpha, "beta": args.beta,
               "kappa": spec.kappa, "theta": spec.theta,
               "plateau_forcing_mass": rows[0][1].plateau_forcing_mass if rows else 0.0}
    if len(rows) >= 4:
        s1 = testfuncs.scaling_fit([(T, v.I1) for T, v in rows])
        s2 = testfuncs.scaling_fit([(T, v.I2) for T, v in rows])
        summary["slope_I1"], summary["slope_I2"] = s1[0], s2[0]
        if args.variant == "power":
            theory = spec.kappa * args.n + 1.0 - spec.a
            summary["slope_theory"] = theory
            summary["slope_deviation"] = max(abs(s1[0] - theory), abs(s2[0] - theory))
            print(f"fitted slopes: I1 {s1[0]:.4f}, I2 {s2[0]:.4f} (theory {theory:.4f})")
        else:
            lnF = [(math.log(T), v.I2 / T) for T, v in rows]
            x = np.log([u for u, _ in lnF])
            y = np.log([w for _, w in lnF])
            slope = float(np.polyfit(x, y, 1)[0])
            summary["log_rate"] = slope
            summary["log_rate_theory"] = 1.0 - args.n
            print(f"fitted log-rate of I2/T vs ln T: {slope:.4f} (theory {1 - args.n})")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["T", "I1", "I2", "F", "U0"])
            for T, v in rows:
                writer.writerow([repr(float(T)), repr(v.I1), repr(v.I2), repr(v.F), repr(v.U0)])
        print(f"CSV written to {args.csv}")
    if args.json:
        _emit_json(summary)
    return 0


def cmd_simulate(args) -> int:
    exps = (args.n, args.p, args.alpha, args.beta, args.lam, args.mu)
    spec = ProblemSpec(n=args.n, p=args.p, lam=args.lam, mu=args.mu,
                       alpha=args.alpha, beta=args.beta,
                       forcing=_build_forcing(args, exps),
                       initial=_build_initial(args, exps))
    report = validate_spec(spec)
    if not report.ok:
        print("invalid spec: " + report.first_failure(), file=sys.stderr)
        return 1
    grid = RadialGrid(R=args.R, N=args.N)
    config = SolverConfig(t_max=args.t_max, delta=args.delta, sigma=args.sigma,
                          u_blow=args.u_blow, dt_min=args.dt_min,
                          snapshot_count=args.snapshots)
    verdict, trajectory = run(spec, grid, config)
    print(f"verdict: {verdict.outcome} (trigger {verdict.trigger}) at t = {verdict.final_time:g} "
          f"after {verdict.step_count} steps")
    if verdict.t_blow is not None:
        print(f"t_blow = {verdict.t_blow:g}")
    if verdict.sup_max is not None:
        print(f"max sup-norm = {verdict.sup_max:g}")
    if args.record:
        r_val = spec.forcing.exponent if spec.forcing.kind == "power-tail" else None
        pred = exponents.classify(spec, r=r_val)
        rec = sweep_mod.RunRecord(
            record_id=sweep_mod._point_id(spec, spec.alpha, spec.beta, r_val),
            spec=spec, alpha=spec.alpha, beta=spec.beta, r=r_val,
            prediction=pred, observation=verdict,
            near_critical=sweep_mod._near_critical(spec, r_val))
        Path(args.record).write_text(json.dumps(rec.to_dict(), indent=1))
        print(f"run record written to {args.record}")
    if args.snapshot_csv:
        with open(args.snapshot_csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "r", "u"])
            for k, t in enumerate(trajectory.times):
                for i, r_ in enumerate(trajectory.radii):
                    writer.writerow([repr(float(t)), repr(float(r_)),
                                     repr(float(trajectory.frames[k, i]))])
        print(f"snapshots written to {args.snapshot_csv}")
    if args.json:
        _emit_json({"verdict": verdict.to_dict(), "spec": spec_to_dict(spec)})
    return 0


def cmd_sweep(args) -> int:
    plan_dict = json.loads(Path(args.plan).read_text())
    if args.output_dir is not None:
        plan_dict["output_dir"] = args.output_dir
    if args.classification_only:
        plan_dict["classification_only"] = True
    plan = sweep_mod.plan_from_dict(plan_dict)
    records = sweep_mod.run_sweep(plan)
    if not records:
        print("empty plan: no records")
        return 0
    out_dir = plan.output_dir or "."
    csv_path, summary_path = sweep_mod.write_outputs(records, out_dir)
    _, summary = sweep_mod.emit_report(records)
    print(f"{len(records)} records; agree {summary['agree']}, disagree {summary['disagree']}, "
          f"inconclusive {summary['inconclusive']}")
    print(f"wrote {csv_path} and {summary_path}")
    if args.json:
        _emit_json(summary)
    return 0


def cmd_report(args) -> int:
    records = sweep_mod.load_records(args.runs)
    if not records:
        print(f"no run records found under {args.runs}", file=sys.stderr)
        return 1
    csv_path, summary_path = sweep_mod.write_outputs(records, args.output_dir)
    _, summary = sweep_mod.emit_report(records)
    print(f"{len(records)} records; agree {summary['agree']}, disagree {summary['disagree']}, "
          f"inconclusive {summary['inconclusive']}")
    print(f"wrote {csv_path} and {summary_path}")
    if args.json:
        _emit_json(summary)
    return 0


def _add_exponent_flags(p, with_lam_mu=True):
    # soft-required: a --config file may supply them; checked after parsing
    p.add_argument("-n", type=int, default=None, help="spatial dimension")
    p.add_argument("-p", dest="p", type=float, default=None, help="p-Laplacian exponent")
    p.add_argument("--alpha", type=float, default=None, help="reaction exponent")
    p.add_argument("--beta", type=float, default=None, help="gradient exponent")
    p.set_defaults(_required=("n", "p", "alpha", "beta"))
    if with_lam_mu:
        p.add_argument("--lambda", dest="lam", type=float, default=1.0)
        p.add_argument("--mu", type=float, default=1.0)


def _add_forcing_flags(p, kinds):
    p.add_argument("--forcing", choices=kinds, default="gaussian")
    p.add_argument("--forcing-amplitude", type=float, default=1.0)
    p.add_argument("--forcing-width", type=float, default=1.0)
    p.add_argument("--forcing-exponent", type=float, default=2.0,
                   help="power-tail decay rate r")
    p.add_argument("--forcing-r0", type=float, default=1.0,
                   help="power-tail inner plateau radius")
    p.add_argument("--forcing-sign",
                   choices=("strictly-positive", "positive-integral", "unsigned"),
                   default="strictly-positive")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcrit",
                                     description="critical-exponent laboratory for the "
                                                 "p-Laplace heat equation")
    parser.add_argument("--config", default=None,
                        help="JSON file of default flag values (flags override)")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="theoretical regime verdict")
    _add_exponent_flags(c)
    c.add_argument("--r", type=float, default=None, help="forcing decay rate (second-exponent mode)")
    _add_forcing_flags(c, ("zero", "gaussian", "power-tail"))
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("supersolution", help="construct and certify the stationary barrier")
    _add_exponent_flags(s)
    s.add_argument("--m", type=float, default=None, help="decay exponent (default: window midpoint)")
    s.add_argument("--epsilon", type=float, default=None, help="amplitude (default: safety * eps*)")
    s.add_argument("--r", type=float, default=None, help="decay target for the tail certificate")
    s.add_argument("--safety", type=float, default=0.9)
    s.add_argument("--grid-points", type=int, default=4096)
    s.add_argument("--grid-max", type=float, default=1e4)
    s.add_argument("--csv", default=None, help="write (radius, v, grad, p-laplacian, residual)")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_supersolution)

    t = sub.add_parser("testfn", help="rescaled test-function integrals and slope fits")
    t.add_argument("--variant", choices=("power", "log"), default="power")
    _add_exponent_flags(t, with_lam_mu=False)
    t.add_argument("--kappa", type=float, default=None)
    t.add_argument("--theta", type=float, default=None)
    t.add_argument("--T", type=float, nargs="+", default=[1e2, 1e3, 1e4, 1e5, 1e6])
    _add_forcing_flags(t, ("zero", "gaussian", "power-tail"))
    t.set_defaults(forcing="zero")
    t.add_argument("--csv", default=None)
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_testfn)

    m = sub.add_parser("simulate", help="radial finite-volume run with blow-up detection")
    _add_exponent_flags(m)
    _add_forcing_flags(m, ("zero", "gaussian", "power-tail", "barrier-residual"))
    m.add_argument("--initial", choices=("constant", "gaussian", "barrier-fraction"),
                   default="gaussian")
    m.add_argument("--initial-amplitude", type=float, default=1.0)
    m.add_argument("--initial-width", type=float, default=1.0)
    m.add_argument("--initial-fraction", type=float, default=0.5)
    m.add_argument("--m", type=float, default=None, help="barrier decay exponent")
    m.add_argument("--epsilon", type=float, default=None, help="barrier amplitude")
    m.add_argument("--safety", type=float, default=0.9)
    m.add_argument("--R", type=float, default=40.0)
    m.add_argument("--N", type=int, default=512)
    m.add_argument("--t-max", type=float, default=50.0)
    m.add_argument("--sigma", type=float, default=0.4)
    m.add_argument("--delta", type=float, default=1e-8)
    m.add_argument("--u-blow", type=float, default=None)
    m.add_argument("--dt-min", type=float, default=None)
    m.add_argument("--snapshots", type=int, default=65)
    m.add_argument("--record", default=None, help="write a RunRecord JSON here")
    m.add_argument("--snapshot-csv", default=None)
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="run a (alpha, beta, r) sweep plan")
    w.add_argument("--plan", required=True, help="JSON sweep plan")
    w.add_argument("--output-dir", default=None)
    w.add_argument("--classification-only", action="store_true")
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=cmd_sweep)

    r = sub.add_parser("report", help="re-emit CSV + summary from stored run records")
    r.add_argument("--runs", required=True, help="directory of RunRecord JSON files")
    r.add_argument("--output-dir", default=".")
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    # config-file defaults: parse once to find --config, then re-parse with defaults set
    argv = list(sys.argv[1:] if argv is None else argv)
    ns, _ = parser.parse_known_args(argv)
    if getattr(ns, "config", None):
        defaults = json.loads(Path(ns.config).read_text())
        for action in parser._subparsers._group_actions:
            for sub_parser in action.choices.values():
                sub_parser.set_defaults(**{k: v for k, v in defaults.items()
                                           if any(a.dest == k for a in sub_parser._actions)})
    args = parser.parse_args(argv)
    missing = [name for name in getattr(args, "_required", ())
               if getattr(args, name) is None]
    if missing:
        parser.error("the following arguments are required: "
                     + ", ".join(("-" if len(m) == 1 else "--") + m for m in missing))
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
