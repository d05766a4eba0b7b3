"""Critical-exponent formulas and the regime classifier.

The inhomogeneous problem (f != 0) has first critical exponents

    alpha_cr = (p-1)*n/(n-p)   (convention: +inf for n <= p)
    beta_cr  = (p-1)*n/(n-1)

and, once alpha and beta are supercritical, a second critical exponent on the
spatial decay rate r of the forcing:

    r* = max{ p*alpha/(alpha-p+1), beta/(beta-p+1) }.

The classifier maps a validated instance to a verdict: nonexistence of global
solutions, existence possible (for suitable small data), or outside the
supported hypotheses.  Clause tags name the internal rule that fired:
Thm1(i)/(ii) for the first-exponent dichotomy, Thm2(i)/(ii)/(iii) for the
forcing-decay dichotomy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .problem import ProblemSpec, validate_spec

REL_TOL = 1e-12  # exact rational thresholds arise from integer inputs


@dataclass(frozen=True)
class CriticalExponents:
    alpha_cr: float
    beta_cr: float
    source: str


@dataclass(frozen=True)
class RegimePrediction:
    verdict: str                 # "nonexistence-global" | "global-possible" | "outside-theory"
    clause: str
    critical_flags: tuple
    alpha_cr: float
    beta_cr: float
    r_star: Optional[float]
    detail: str = ""

    def to_dict(self) -> dict:
        def enc(x):
            if x is None:
                return None
            return "inf" if math.isinf(x) else x
        return {"verdict": self.verdict, "clause": self.clause,
                "critical_flags": list(self.critical_flags),
                "alpha_cr": enc(self.alpha_cr), "beta_cr": enc(self.beta_cr),
                "r_star": enc(self.r_star), "detail": self.detail}

    @staticmethod
    def from_dict(d: dict) -> "RegimePrediction":
        def dec(x):
            if x is None:
                return None
            return math.inf if x == "inf" else float(x)
        return RegimePrediction(verdict=d["verdict"], clause=d["clause"],
                                critical_flags=tuple(d["critical_flags"]),
                                alpha_cr=dec(d["alpha_cr"]), beta_cr=dec(d["beta_cr"]),
                                r_star=dec(d["r_star"]), detail=d.get("detail", ""))


def _check_p(n: int, p: float) -> None:
    if not p > 2.0 * n / (n + 1):
        raise ValueError(f"p = {p} violates p > 2n/(n+1) = {2.0 * n / (n + 1)}")


def first_critical(n: int, p: float) -> CriticalExponents:
    """Thresholds for the forced problem; alpha_cr = +inf when n <= p."""
    _check_p(n, p)
    alpha_cr = math.inf if n <= p else (p - 1.0) * n / (n - p)
    beta_cr = math.inf if n == 1 else (p - 1.0) * n / (n - 1)
    return CriticalExponents(alpha_cr=alpha_cr, beta_cr=beta_cr, source="InhomogeneousThm1")


def homogeneous_critical(n: int, p: float) -> CriticalExponents:
    """Thresholds for the unforced problem (p-1 + p/n, p-1 + 1/(n+1))."""
    _check_p(n, p)
    return CriticalExponents(alpha_cr=p - 1.0 + p / n, beta_cr=p - 1.0 + 1.0 / (n + 1),
                             source="HomogeneousLuZhang")


def second_critical(p: float, alpha: float, beta: float) -> float:
    if alpha - p + 1.0 <= 0.0 or beta - p + 1.0 <= 0.0:
        raise ValueError("second_critical needs alpha > p-1 and beta > p-1")
    return max(p * alpha / (alpha - p + 1.0), beta / (beta - p + 1.0))


def _close(x: float, thr: float) -> bool:
    if math.isinf(thr) or math.isinf(x):
        return False
    return abs(x - thr) <= REL_TOL * max(1.0, abs(x), abs(thr))


def classify(spec: ProblemSpec, r: Optional[float] = None) -> RegimePrediction:
    """Regime verdict for a validated instance; refuses (outside-theory) rather than guess."""
    report = validate_spec(spec)
    ce = None
    try:
        ce = first_critical(spec.n, spec.p)
    except ValueError:
        pass
    alpha_cr = ce.alpha_cr if ce else math.nan
    beta_cr = ce.beta_cr if ce else math.nan
    try:
        r_star = second_critical(spec.p, spec.alpha, spec.beta)
    except ValueError:
        r_star = None

    def refuse(detail: str) -> RegimePrediction:
        return RegimePrediction(verdict="outside-theory", clause="", critical_flags=(),
                                alpha_cr=alpha_cr, beta_cr=beta_cr, r_star=r_star, detail=detail)

    if not report.ok:
        return refuse("validation failed: " + report.first_failure())
    if spec.lam <= 0.0 or spec.mu <= 0.0:
        return refuse("hypotheses need lambda > 0 and mu > 0")

    flags = []
    alpha_at = _close(spec.alpha, alpha_cr)
    beta_at = _close(spec.beta, beta_cr)
    if alpha_at:
        flags.append("alpha")
    if beta_at:
        flags.append("beta")

    p_is_2 = _close(spec.p, 2.0)

    if r is None:
        alpha_le = alpha_at or spec.alpha < alpha_cr
        beta_le = beta_at or spec.beta < beta_cr
        if alpha_le or beta_le:
            if p_is_2 and spec.forcing.sign not in ("strictly-positive", "positive-integral"):
                return refuse("Thm1(i) at p = 2 needs forcing with positive integral")
            if not p_is_2 and spec.forcing.sign != "strictly-positive":
                return refuse("Thm1(i) at p != 2 needs strictly positive forcing")
            return RegimePrediction(verdict="nonexistence-global", clause="Thm1(i)",
                                    critical_flags=tuple(flags), alpha_cr=alpha_cr,
                                    beta_cr=beta_cr, r_star=r_star)
        if spec.n > spec.p:
            return RegimePrediction(verdict="global-possible", clause="Thm1(ii)",
                                    critical_flags=tuple(flags), alpha_cr=alpha_cr,
                                    beta_cr=beta_cr, r_star=r_star)
        return refuse("existence clause needs n > p")  # unreachable: alpha_cr = inf for n <= p

    # forcing-decay mode
    if not (spec.alpha > alpha_cr and not alpha_at and spec.beta > beta_cr and not beta_at):
        return refuse("Thm2 needs supercritical alpha and beta (strict)")
    if spec.forcing.kind != "power-tail":
        return refuse("decay-rate classification needs a power-tail forcing witness")
    if not _close(r, spec.forcing.exponent):
        return refuse(f"requested decay rate r = {r} does not match the forcing "
                      f"exponent {spec.forcing.exponent}")
    if r >= spec.n:
        return refuse(f"decay classes need r < n, got r = {r}")

    r_at = r_star is not None and _close(r, r_star)
    if r_at:
        flags.append("r")
    if r <= 0.0:
        return RegimePrediction(verdict="nonexistence-global", clause="Thm2(iii)",
                                critical_flags=tuple(flags), alpha_cr=alpha_cr,
                                beta_cr=beta_cr, r_star=r_star)
    if r < r_star and not r_at:
        return RegimePrediction(verdict="nonexistence-global", clause="Thm2(i)",
                                critical_flags=tuple(flags), alpha_cr=alpha_cr,
                                beta_cr=beta_cr, r_star=r_star)
    return RegimePrediction(verdict="global-possible", clause="Thm2(ii)",
                            critical_flags=tuple(flags), alpha_cr=alpha_cr,
                            beta_cr=beta_cr, r_star=r_star)
