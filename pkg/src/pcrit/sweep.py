"""Batch orchestration over (alpha, beta, r) grids with persisted run records."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import exponents
from .exponents import RegimePrediction, classify
from .problem import (ProblemSpec, Verdict, spec_from_dict, spec_to_dict, validate_spec)
from .solver import RadialGrid, SolverConfig, run

RECORD_SCHEMA_VERSION = 1
CSV_COLUMNS = ("alpha", "beta", "r", "predicted", "observed", "agree",
               "t_blow", "sup_max", "clause", "critical_flag", "near_critical")


def worker_count() -> int:
    env = os.environ.get("PCRIT_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SweepPlan:
    alphas: tuple
    betas: tuple
    rs: tuple                      # (None,) when r is not swept
    template: ProblemSpec
    grid: RadialGrid
    config: SolverConfig
    classification_only: bool = False
    output_dir: Optional[str] = None

    @staticmethod
    def make(alphas, betas, template, grid, config, rs=None,
             classification_only=False, output_dir=None) -> "SweepPlan":
        return SweepPlan(alphas=tuple(float(a) for a in alphas),
                         betas=tuple(float(b) for b in betas),
                         rs=(None,) if rs is None else tuple(float(r) for r in rs),
                         template=template, grid=grid, config=config,
                         classification_only=classification_only, output_dir=output_dir)


def plan_to_dict(plan: SweepPlan) -> dict:
    return {
        "alphas": list(plan.alphas),
        "betas": list(plan.betas),
        "rs": None if plan.rs == (None,) else list(plan.rs),
        "template": spec_to_dict(plan.template),
        "grid": {"R": plan.grid.R, "N": plan.grid.N},
        "config": {"t_max": plan.config.t_max, "delta": plan.config.delta,
                   "sigma": plan.config.sigma, "u_blow": plan.config.u_blow,
                   "dt_min": plan.config.dt_min,
                   "snapshot_count": plan.config.snapshot_count},
        "classification_only": plan.classification_only,
        "output_dir": plan.output_dir,
    }


def plan_from_dict(d: dict) -> SweepPlan:
    cfg = d.get("config", {})
    return SweepPlan.make(
        alphas=d["alphas"], betas=d["betas"], rs=d.get("rs"),
        template=spec_from_dict(d["template"]),
        grid=RadialGrid(R=float(d["grid"]["R"]), N=int(d["grid"]["N"])),
        config=SolverConfig(t_max=float(cfg.get("t_max", 10.0)),
                            delta=float(cfg.get("delta", 1e-8)),
                            sigma=float(cfg.get("sigma", 0.4)),
                            u_blow=None if cfg.get("u_blow") is None else float(cfg["u_blow"]),
                            dt_min=None if cfg.get("dt_min") is None else float(cfg["dt_min"]),
                            snapshot_count=int(cfg.get("snapshot_count", 65))),
        classification_only=bool(d.get("classification_only", False)),
        output_dir=d.get("output_dir"))


@dataclass(frozen=True)
class RunRecord:
    record_id: str
    spec: ProblemSpec
    alpha: float
    beta: float
    r: Optional[float]
    prediction: RegimePrediction
    observation: Verdict
    near_critical: bool
    timings: dict = field(default_factory=dict, compare=False)
    schema_version: int = RECORD_SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "record_id": self.record_id,
            "swept": {"alpha": self.alpha, "beta": self.beta, "r": self.r},
            "spec": spec_to_dict(self.spec),
            "prediction": self.prediction.to_dict(),
            "observation": self.observation.to_dict(),
            "near_critical": self.near_critical,
            "timings": self.timings,
        }

    @staticmethod
    def from_dict(d: dict) -> "RunRecord":
        return RunRecord(record_id=d["record_id"], spec=spec_from_dict(d["spec"]),
                         alpha=float(d["swept"]["alpha"]), beta=float(d["swept"]["beta"]),
                         r=None if d["swept"]["r"] is None else float(d["swept"]["r"]),
                         prediction=RegimePrediction.from_dict(d["prediction"]),
                         observation=Verdict.from_dict(d["observation"]),
                         near_critical=bool(d["near_critical"]),
                         timings=d.get("timings", {}),
                         schema_version=int(d.get("schema_version", 0)))


def _point_id(spec: ProblemSpec, alpha: float, beta: float, r: Optional[float]) -> str:
    payload = json.dumps({"spec": spec_to_dict(spec), "alpha": alpha, "beta": beta, "r": r},
                         sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _instantiate(template: ProblemSpec, alpha: float, beta: float, r: Optional[float]) -> ProblemSpec:
    forcing = template.forcing
    if r is not None:
        if forcing.kind != "power-tail":
            raise ValueError("r-sweeps need a power-tail forcing template")
        forcing = dataclasses.replace(forcing, exponent=float(r))
    return dataclasses.replace(template, alpha=float(alpha), beta=float(beta), forcing=forcing)


def _near_critical(spec: ProblemSpec, r: Optional[float], tol: float = 0.05) -> bool:
    try:
        ce = exponents.first_critical(spec.n, spec.p)
    except ValueError:
        return False
    thresholds = []
    if math.isfinite(ce.alpha_cr):
        thresholds.append((spec.alpha, ce.alpha_cr))
    if math.isfinite(ce.beta_cr):
        thresholds.append((spec.beta, ce.beta_cr))
    if r is not None:
        try:
            thresholds.append((r, exponents.second_critical(spec.p, spec.alpha, spec.beta)))
        except ValueError:
            pass
    return any(abs(x - thr) <= tol * abs(thr) for x, thr in thresholds)


def _run_point(plan: SweepPlan, alpha: float, beta: float, r: Optional[float]) -> RunRecord:
    timings = {}
    try:
        spec = _instantiate(plan.template, alpha, beta, r)
    except Exception as exc:
        spec = plan.template
        prediction = RegimePrediction(verdict="outside-theory", clause="", critical_flags=(),
                                      alpha_cr=math.nan, beta_cr=math.nan, r_star=None,
                                      detail=f"instantiation failed: {exc}")
        observation = Verdict(outcome="inconclusive", reason="skipped: instantiation failed")
        return RunRecord(record_id=_point_id(spec, alpha, beta, r), spec=spec, alpha=alpha,
                         beta=beta, r=r, prediction=prediction, observation=observation,
                         near_critical=False, timings=timings)

    t0 = time.perf_counter()
    prediction = classify(spec, r=r)
    timings["classify_s"] = time.perf_counter() - t0

    if plan.classification_only:
        observation = Verdict(outcome="inconclusive",
                              reason="skipped: classification-only mode")
    elif not validate_spec(spec).ok:
        observation = Verdict(outcome="inconclusive", reason="skipped: validation failed")
    else:
        t0 = time.perf_counter()
        try:
            observation, _ = run(spec, plan.grid, plan.config)
        except Exception as exc:  # a failed point must never abort the sweep
            observation = Verdict(outcome="inconclusive", reason=f"simulation failed: {exc}")
        timings["simulate_s"] = time.perf_counter() - t0

    return RunRecord(record_id=_point_id(spec, alpha, beta, r), spec=spec,
                     alpha=alpha, beta=beta, r=r, prediction=prediction,
                     observation=observation, near_critical=_near_critical(spec, r),
                     timings=timings)


def run_sweep(plan: SweepPlan) -> list:
    """Classify (and optionally simulate) every grid point; one record per point."""
    points = [(a, b, r) for a in plan.alphas for b in plan.betas for r in plan.rs]
    if not points:
        return []
    out_dir = None
    if plan.output_dir is not None:
        out_dir = Path(plan.output_dir) / "runs"
        out_dir.mkdir(parents=True, exist_ok=True)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        records = list(pool.map(lambda pt: _run_point(plan, *pt), points))

    records.sort(key=lambda rec: (rec.alpha, rec.beta,
                                  -math.inf if rec.r is None else rec.r))
    if out_dir is not None:
        for rec in records:
            (out_dir / f"{rec.record_id}.json").write_text(json.dumps(rec.to_dict(), indent=1))
    return records


def _agreement(prediction: RegimePrediction, observation: Verdict) -> str:
    if observation.outcome == "inconclusive" or prediction.verdict == "outside-theory":
        return ""
    expected = {"nonexistence-global": "blow-up", "global-possible": "global-bounded"}
    return "yes" if observation.outcome == expected[prediction.verdict] else "no"


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def emit_report(records) -> tuple:
    """(CSV text, JSON-able summary). Inconclusive observations are counted, never judged."""
    if not records:
        raise ValueError("emit_report needs at least one record")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    agree_count = disagree_count = inconclusive_count = 0
    by_clause: dict = {}
    disagreements = []
    for rec in records:
        agree = _agreement(rec.prediction, rec.observation)
        if agree == "yes":
            agree_count += 1
        elif agree == "no":
            disagree_count += 1
            disagreements.append({"alpha": rec.alpha, "beta": rec.beta, "r": rec.r,
                                  "predicted": rec.prediction.verdict,
                                  "observed": rec.observation.outcome,
                                  "near_critical": rec.near_critical})
        else:
            inconclusive_count += 1
        clause = rec.prediction.clause or "none"
        stats = by_clause.setdefault(clause, {"total": 0, "agree": 0, "disagree": 0,
                                              "inconclusive": 0})
        stats["total"] += 1
        stats["agree" if agree == "yes" else "disagree" if agree == "no"
              else "inconclusive"] += 1
        writer.writerow([
            _fmt(rec.alpha), _fmt(rec.beta), _fmt(rec.r),
            rec.prediction.verdict, rec.observation.outcome, agree,
            _fmt(rec.observation.t_blow), _fmt(rec.observation.sup_max),
            rec.prediction.clause, ",".join(rec.prediction.critical_flags),
            "yes" if rec.near_critical else "no",
        ])
    template = records[0].spec
    try:
        ce = exponents.first_critical(template.n, template.p)
        alpha_cr = None if math.isinf(ce.alpha_cr) else ce.alpha_cr
        beta_cr = None if math.isinf(ce.beta_cr) else ce.beta_cr
    except ValueError:
        alpha_cr = beta_cr = None
    summary = {
        "total": len(records),
        "agree": agree_count,
        "disagree": disagree_count,
        "inconclusive": inconclusive_count,
        "by_clause": by_clause,
        "disagreements": disagreements,
        "alpha_cr": alpha_cr,
        "beta_cr": beta_cr,
        "note": ("Inconclusive observations are counted separately, never as disagreement. "
                 "Near-critical disagreements are expected: finite-horizon simulation "
                 "cannot resolve the boundary, so disagreement there is not an error."),
    }
    return buf.getvalue(), summary


def parse_report_csv(text: str) -> list:
    rows = []
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV columns: {reader.fieldnames}")
    for row in reader:
        rows.append({k: (float(v) if k in ("alpha", "beta", "r", "t_blow", "sup_max") and v != ""
                         else v if v != "" else None)
                     for k, v in row.items()})
    return rows


def write_outputs(records, out_dir) -> tuple:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_text, summary = emit_report(records)
    csv_path = out / "sweep.csv"
    csv_path.write_text(csv_text)
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=1))
    return csv_path, summary_path


def load_records(runs_dir) -> list:
    recs = []
    for path in sorted(Path(runs_dir).glob("*.json")):
        recs.append(RunRecord.from_dict(json.loads(path.read_text())))
    recs.sort(key=lambda rec: (rec.alpha, rec.beta, -math.inf if rec.r is None else rec.r))
    return recs
