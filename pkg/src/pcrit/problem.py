"""Problem instances for u_t - div(|grad u|^{p-2} grad u) = lam*|u|^a + mu*|grad u|^b + f(x).

Everything downstream (classifier, barrier certification, solver, sweeps)
consumes a validated :class:`ProblemSpec`.  All data are radial: forcing and
initial profiles are functions of |x| only, represented either by closed-form
evaluators or by linearly interpolated tables.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .barrier import SupersolutionParams, barrier_profile

SCHEMA_VERSION = 1

FORCING_KINDS = ("zero", "gaussian", "power-tail", "supersolution-residual", "table")
INITIAL_KINDS = ("constant", "gaussian-bump", "supersolution-fraction", "table")
SIGN_CLASSES = ("strictly-positive", "positive-integral", "unsigned")


def sphere_area(n: int) -> float:
    """Surface area of the unit (n-1)-sphere via w_{n+2} = 2*pi*w_n / n.

    This is the radial quadrature weight: integral over R^n of g(|x|) dx
    equals sphere_area(n) * integral of g(r) r^{n-1} dr.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n!r}")
    if n == 1:
        return 2.0
    if n == 2:
        return 2.0 * math.pi
    w = {1: 2.0, 2: 2.0 * math.pi}
    k = 1 if n % 2 else 2
    while k + 2 <= n:
        w[k + 2] = 2.0 * math.pi * w[k] / k
        k += 2
    return w[n]


@dataclass(frozen=True)
class ForcingSpec:
    """Radial forcing profile plus its declared sign class."""

    kind: str
    sign: str = "unsigned"
    amplitude: float = 0.0
    width: float = 1.0
    exponent: float = 0.0       # power-tail decay rate
    inner_radius: float = 1.0   # power-tail plateau radius R0
    barrier: Optional[SupersolutionParams] = None
    radii: tuple = ()
    values: tuple = ()

    @staticmethod
    def zero() -> "ForcingSpec":
        return ForcingSpec(kind="zero", sign="unsigned")

    @staticmethod
    def gaussian(amplitude: float, width: float, sign: str = "strictly-positive") -> "ForcingSpec":
        return ForcingSpec(kind="gaussian", sign=sign, amplitude=float(amplitude), width=float(width))

    @staticmethod
    def power_tail(amplitude: float, exponent: float, inner_radius: float = 1.0,
                   sign: str = "strictly-positive") -> "ForcingSpec":
        """f(x) = C * max(|x|, R0)^(-r): equals C|x|^{-r} beyond R0 by construction."""
        return ForcingSpec(kind="power-tail", sign=sign, amplitude=float(amplitude),
                           exponent=float(exponent), inner_radius=float(inner_radius))

    @staticmethod
    def residual(params: SupersolutionParams, sign: str = "strictly-positive") -> "ForcingSpec":
        return ForcingSpec(kind="supersolution-residual", sign=sign, barrier=params)

    @staticmethod
    def table(radii: Sequence[float], values: Sequence[float], sign: str = "unsigned") -> "ForcingSpec":
        return ForcingSpec(kind="table", sign=sign,
                           radii=tuple(float(r) for r in radii),
                           values=tuple(float(v) for v in values))

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(r)
        if self.kind == "gaussian":
            return self.amplitude * np.exp(-((r / self.width) ** 2))
        if self.kind == "power-tail":
            return self.amplitude * np.maximum(r, self.inner_radius) ** (-self.exponent)
        if self.kind == "supersolution-residual":
            return barrier_profile(self.barrier, r)["residual"]
        if self.kind == "table":
            return np.interp(r, self.radii, self.values)
        raise ValueError(f"unknown forcing kind {self.kind!r}")

    @property
    def length_scale(self) -> float:
        if self.kind == "gaussian":
            return self.width
        if self.kind == "power-tail":
            return self.inner_radius
        if self.kind == "table" and self.radii:
            return max(self.radii[-1] / 8.0, 1e-6)
        return 1.0


@dataclass(frozen=True)
class InitialDataSpec:
    """Radial initial datum u0(|x|)."""

    kind: str
    amplitude: float = 0.0
    width: float = 1.0
    fraction: float = 1.0
    barrier: Optional[SupersolutionParams] = None
    radii: tuple = ()
    values: tuple = ()

    @staticmethod
    def constant(c: float) -> "InitialDataSpec":
        return InitialDataSpec(kind="constant", amplitude=float(c))

    @staticmethod
    def gaussian(amplitude: float, width: float) -> "InitialDataSpec":
        return InitialDataSpec(kind="gaussian-bump", amplitude=float(amplitude), width=float(width))

    @staticmethod
    def barrier_fraction(fraction: float, params: SupersolutionParams) -> "InitialDataSpec":
        """u0 = fraction * v with 0 < fraction <= 1, so u0 sits below the barrier."""
        return InitialDataSpec(kind="supersolution-fraction", fraction=float(fraction), barrier=params)

    @staticmethod
    def table(radii: Sequence[float], values: Sequence[float]) -> "InitialDataSpec":
        return InitialDataSpec(kind="table",
                               radii=tuple(float(r) for r in radii),
                               values=tuple(float(v) for v in values))

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "constant":
            return np.full_like(r, self.amplitude)
        if self.kind == "gaussian-bump":
            return self.amplitude * np.exp(-((r / self.width) ** 2))
        if self.kind == "supersolution-fraction":
            return self.fraction * barrier_profile(self.barrier, r)["v"]
        if self.kind == "table":
            return np.interp(r, self.radii, self.values)
        raise ValueError(f"unknown initial-data kind {self.kind!r}")

    @property
    def length_scale(self) -> float:
        if self.kind == "gaussian-bump":
            return self.width
        if self.kind == "table" and self.radii:
            return max(self.radii[-1] / 8.0, 1e-6)
        return 1.0


@dataclass(frozen=True)
class ProblemSpec:
    n: int
    p: float
    lam: float
    mu: float
    alpha: float
    beta: float
    forcing: ForcingSpec = field(default_factory=ForcingSpec.zero)
    initial: InitialDataSpec = field(default_factory=lambda: InitialDataSpec.constant(0.0))

    @property
    def length_scale(self) -> float:
        return max(self.forcing.length_scale, self.initial.length_scale)


@dataclass(frozen=True)
class RuleCheck:
    rule: str
    passed: bool
    message: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> tuple:
        return tuple(c for c in self.checks if not c.passed)

    def first_failure(self) -> str:
        return self.failures[0].message if self.failures else ""


def _sign_check_grid(scale: float) -> np.ndarray:
    scale = max(scale, 1e-12)
    return np.concatenate([[0.0], np.geomspace(1e-3 * scale, 8.0 * scale, 255)])


def validate_spec(spec: ProblemSpec) -> ValidationReport:
    """Pure, deterministic rule check; the report names each violated constraint."""
    checks = []

    n_ok = isinstance(spec.n, (int, np.integer)) and spec.n >= 1
    checks.append(RuleCheck("dimension", bool(n_ok),
                            "" if n_ok else f"n must be a positive integer, got {spec.n!r}"))

    if n_ok:
        p_bound = 2.0 * spec.n / (spec.n + 1)
        p_ok = spec.p > p_bound
        checks.append(RuleCheck("p-range", bool(p_ok),
                                "" if p_ok else f"p <= 2n/(n+1) = {p_bound}"))
    else:
        checks.append(RuleCheck("p-range", False, "p-range unchecked: invalid n"))

    lower = max(1.0, spec.p - 1.0)
    a_ok = spec.alpha > lower
    checks.append(RuleCheck("alpha-range", bool(a_ok),
                            "" if a_ok else "alpha <= max{1, p-1}"))
    b_ok = spec.beta > lower
    checks.append(RuleCheck("beta-range", bool(b_ok),
                            "" if b_ok else "beta <= max{1, p-1}"))

    # Declared sign class is re-verified numerically on the evaluation grid.
    sign_ok, sign_msg = True, ""
    if spec.forcing.sign not in SIGN_CLASSES:
        sign_ok, sign_msg = False, f"unknown sign class {spec.forcing.sign!r}"
    else:
        try:
            grid = _sign_check_grid(spec.forcing.length_scale)
            fv = spec.forcing.evaluate(grid)
            if not np.all(np.isfinite(fv)):
                sign_ok, sign_msg = False, "forcing evaluates to non-finite values"
            elif spec.forcing.sign == "strictly-positive" and fv.min() <= 0.0:
                sign_ok, sign_msg = False, "declared strictly-positive but min sample <= 0"
            elif spec.forcing.sign == "positive-integral" and n_ok:
                mass = float(np.trapezoid(fv * grid ** (spec.n - 1), grid))
                if mass <= 0.0:
                    sign_ok, sign_msg = False, "declared positive-integral but sampled mass <= 0"
        except Exception as exc:  # table/barrier construction errors surface here
            sign_ok, sign_msg = False, f"forcing evaluation failed: {exc}"
    checks.append(RuleCheck("forcing-sign", sign_ok, sign_msg))

    if spec.forcing.kind == "power-tail" and n_ok:
        r_ok = spec.forcing.exponent < spec.n
        checks.append(RuleCheck("power-tail-decay", bool(r_ok),
                                "" if r_ok else
                                f"power-tail exponent r = {spec.forcing.exponent} must satisfy r < n"))

    init_ok, init_msg = True, ""
    if spec.initial.kind == "supersolution-fraction" and not (0.0 < spec.initial.fraction <= 1.0):
        init_ok, init_msg = False, "supersolution fraction must lie in (0, 1]"
    else:
        try:
            iv = spec.initial.evaluate(_sign_check_grid(spec.initial.length_scale))
            if not np.all(np.isfinite(iv)):
                init_ok, init_msg = False, "initial data evaluates to non-finite values"
        except Exception as exc:
            init_ok, init_msg = False, f"initial data evaluation failed: {exc}"
    checks.append(RuleCheck("initial-data", init_ok, init_msg))

    return ValidationReport(checks=tuple(checks))


# ---------------------------------------------------------------------------
# JSON serialization (schema documented in README, versioned)

def _barrier_to_json(b: Optional[SupersolutionParams]):
    if b is None:
        return None
    return {"n": b.n, "p": b.p, "alpha": b.alpha, "beta": b.beta,
            "lambda": b.lam, "mu": b.mu, "m": b.m, "epsilon": b.epsilon,
            "r": b.r}


def _barrier_from_json(d) -> Optional[SupersolutionParams]:
    if d is None:
        return None
    return SupersolutionParams(n=int(d["n"]), p=float(d["p"]), alpha=float(d["alpha"]),
                               beta=float(d["beta"]), lam=float(d["lambda"]), mu=float(d["mu"]),
                               m=float(d["m"]), epsilon=float(d["epsilon"]),
                               r=None if d.get("r") is None else float(d["r"]))


def spec_to_dict(spec: ProblemSpec) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n": spec.n,
        "p": spec.p,
        "lambda": spec.lam,
        "mu": spec.mu,
        "alpha": spec.alpha,
        "beta": spec.beta,
        "forcing": {
            "kind": spec.forcing.kind,
            "sign": spec.forcing.sign,
            "amplitude": spec.forcing.amplitude,
            "width": spec.forcing.width,
            "exponent": spec.forcing.exponent,
            "inner_radius": spec.forcing.inner_radius,
            "barrier": _barrier_to_json(spec.forcing.barrier),
            "radii": list(spec.forcing.radii),
            "values": list(spec.forcing.values),
        },
        "initial": {
            "kind": spec.initial.kind,
            "amplitude": spec.initial.amplitude,
            "width": spec.initial.width,
            "fraction": spec.initial.fraction,
            "barrier": _barrier_to_json(spec.initial.barrier),
            "radii": list(spec.initial.radii),
            "values": list(spec.initial.values),
        },
    }


def spec_from_dict(d: dict) -> ProblemSpec:
    version = d.get("schema_version", 0)
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    f, i = d["forcing"], d["initial"]
    forcing = ForcingSpec(kind=f["kind"], sign=f.get("sign", "unsigned"),
                          amplitude=float(f.get("amplitude", 0.0)),
                          width=float(f.get("width", 1.0)),
                          exponent=float(f.get("exponent", 0.0)),
                          inner_radius=float(f.get("inner_radius", 1.0)),
                          barrier=_barrier_from_json(f.get("barrier")),
                          radii=tuple(f.get("radii", ())), values=tuple(f.get("values", ())))
    initial = InitialDataSpec(kind=i["kind"], amplitude=float(i.get("amplitude", 0.0)),
                              width=float(i.get("width", 1.0)),
                              fraction=float(i.get("fraction", 1.0)),
                              barrier=_barrier_from_json(i.get("barrier")),
                              radii=tuple(i.get("radii", ())), values=tuple(i.get("values", ())))
    return ProblemSpec(n=int(d["n"]), p=float(d["p"]), lam=float(d["lambda"]),
                       mu=float(d["mu"]), alpha=float(d["alpha"]), beta=float(d["beta"]),
                       forcing=forcing, initial=initial)


def spec_to_json(spec: ProblemSpec, **kwargs) -> str:
    return json.dumps(spec_to_dict(spec), **kwargs)


def spec_from_json(text: str) -> ProblemSpec:
    return spec_from_dict(json.loads(text))


@dataclass(frozen=True)
class Verdict:
    """Numerical proxy for the blow-up / global dichotomy of one simulation."""

    outcome: str                 # "blow-up" | "global-bounded" | "inconclusive"
    t_blow: Optional[float] = None
    sup_max: Optional[float] = None
    reason: str = ""
    final_time: float = 0.0
    step_count: int = 0
    trigger: str = ""

    def to_dict(self) -> dict:
        return {"outcome": self.outcome, "t_blow": self.t_blow, "sup_max": self.sup_max,
                "reason": self.reason, "final_time": self.final_time,
                "step_count": self.step_count, "trigger": self.trigger}

    @staticmethod
    def from_dict(d: dict) -> "Verdict":
        return Verdict(outcome=d["outcome"],
                       t_blow=None if d.get("t_blow") is None else float(d["t_blow"]),
                       sup_max=None if d.get("sup_max") is None else float(d["sup_max"]),
                       reason=d.get("reason", ""),
                       final_time=float(d.get("final_time", 0.0)),
                       step_count=int(d.get("step_count", 0)),
                       trigger=d.get("trigger", ""))
