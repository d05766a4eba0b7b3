"""Explicit stationary barrier v(x) = eps*(1 + |x|^{p/(p-1)})^{-m} and its certificate.

With q = p/(p-1), B = 1 + r^q and A = (eps*m*p/(p-1))^{p-1}, the closed forms are

    v        = eps * B^{-m}
    |grad v| = eps*m*q * r^{q-1} * B^{-m-1}
    Delta_p v = -A * ( n*B^{-(m+1)(p-1)} - (m+1)*p * r^q * B^{-(m+1)(p-1)-1} )

so that the residual forcing f := -Delta_p v - lam*v^alpha - mu*|grad v|^beta
admits the pointwise lower bound A * M_eps * B^{-(m+1)(p-1)}, where

    M_eps = (n - p - m*p) - lam*eps^{alpha-p+1}*((p-1)/(m*p))^{p-1}
            - mu*(eps*m*p/(p-1))^{beta-p+1}.

Positivity of M_eps certifies that v is a strict stationary supersolution for
every forcing dominated by f; the amplitude threshold eps* is the unique root
of M_eps = 0.  Coefficients lam, mu are kept general (the lam = mu = 1 case
recovers the classical display).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


class CertificationError(RuntimeError):
    """Raised when certification preconditions fail; carries the computed eps*."""

    def __init__(self, message: str, epsilon_star: float):
        super().__init__(message)
        self.epsilon_star = epsilon_star


@dataclass(frozen=True)
class SupersolutionParams:
    n: int
    p: float
    alpha: float
    beta: float
    lam: float
    mu: float
    m: float
    epsilon: float
    r: Optional[float] = None


@dataclass(frozen=True)
class BarrierEvaluation:
    v: float
    grad_norm: float
    p_laplacian: float
    residual: float


@dataclass(frozen=True)
class DecayCertificate:
    r: float
    inner_radius: float
    constant: float      # C with f(radius) <= C * radius^{-r} on the grid
    margin: float        # multiplicative safety applied to the grid maximum


@dataclass(frozen=True)
class Certificate:
    params: SupersolutionParams
    epsilon_star: float
    safety_factor: float
    m_window: tuple
    m_epsilon: float
    grid_points: int
    grid_max: float
    residual_min: float
    bound_min: float
    margin_min: float        # min over grid of (residual - analytic bound)
    pde_residual_max: float  # max |Delta_p v + lam v^a + mu |grad v|^b + f|, ~0 by construction
    decay: Optional[DecayCertificate]
    ok: bool

    def to_dict(self) -> dict:
        d = {
            "params": {"n": self.params.n, "p": self.params.p, "alpha": self.params.alpha,
                       "beta": self.params.beta, "lambda": self.params.lam, "mu": self.params.mu,
                       "m": self.params.m, "epsilon": self.params.epsilon, "r": self.params.r},
            "epsilon_star": self.epsilon_star,
            "safety_factor": self.safety_factor,
            "m_window": list(self.m_window),
            "m_epsilon": self.m_epsilon,
            "grid_points": self.grid_points,
            "grid_max": self.grid_max,
            "residual_min": self.residual_min,
            "bound_min": self.bound_min,
            "margin_min": self.margin_min,
            "pde_residual_max": self.pde_residual_max,
            "decay": None,
            "ok": self.ok,
        }
        if self.decay is not None:
            d["decay"] = {"r": self.decay.r, "inner_radius": self.decay.inner_radius,
                          "constant": self.decay.constant, "margin": self.decay.margin}
        return d


def admissible_m_range(n: int, p: float, alpha: float, beta: float,
                       r: Optional[float] = None) -> Optional[tuple]:
    """Open interval of admissible decay exponents m, or None when empty."""
    if alpha <= p - 1.0 or beta <= p - 1.0:
        raise ValueError("admissible window needs alpha > p-1 and beta > p-1")
    if p <= 1.0:
        raise ValueError("admissible window needs p > 1")
    lo = max((p - 1.0) / (alpha - p + 1.0),
             (p - 1.0) * (p - beta) / (p * (beta - p + 1.0)))
    if r is not None:
        lo = max(lo, (r - p) / p)
    hi = (n - p) / p
    if lo >= hi:
        return None
    return (lo, hi)


def barrier_profile(params: SupersolutionParams, radius) -> dict:
    """Vectorized closed forms for v, |grad v|, Delta_p v and the residual f."""
    r = np.asarray(radius, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be >= 0")
    n, p, m, eps = params.n, params.p, params.m, params.epsilon
    q = p / (p - 1.0)
    A = (eps * m * p / (p - 1.0)) ** (p - 1.0)
    rq = r ** q
    B = 1.0 + rq
    k = (m + 1.0) * (p - 1.0)
    v = eps * B ** (-m)
    grad = eps * m * q * r ** (q - 1.0) * B ** (-m - 1.0)
    p_lap = -A * (n * B ** (-k) - (m + 1.0) * p * rq * B ** (-k - 1.0))
    residual = -p_lap - params.lam * v ** params.alpha - params.mu * grad ** params.beta
    return {"v": v, "grad_norm": grad, "p_laplacian": p_lap, "residual": residual,
            "bound": A * m_epsilon(params) * B ** (-k)}


def evaluate(params: SupersolutionParams, radius: float) -> BarrierEvaluation:
    prof = barrier_profile(params, radius)
    return BarrierEvaluation(v=float(prof["v"]), grad_norm=float(prof["grad_norm"]),
                             p_laplacian=float(prof["p_laplacian"]),
                             residual=float(prof["residual"]))


def m_epsilon(params: SupersolutionParams) -> float:
    return m_epsilon_value(params.n, params.p, params.alpha, params.beta,
                           params.m, params.epsilon, params.lam, params.mu)


def m_epsilon_value(n, p, alpha, beta, m, eps, lam, mu):
    """Amplitude slack; strictly decreasing in eps since alpha, beta > p-1."""
    eps = np.asarray(eps, dtype=float)
    return ((n - p - m * p)
            - lam * eps ** (alpha - p + 1.0) * ((p - 1.0) / (m * p)) ** (p - 1.0)
            - mu * (eps * m * p / (p - 1.0)) ** (beta - p + 1.0))


def epsilon_star(n: int, p: float, alpha: float, beta: float, m: float,
                 lam: float, mu: float, rel_tol: float = 1e-10) -> float:
    """Unique root of M_eps = 0 by bisection. Any eps < eps* gives M_eps > 0."""
    if lam <= 0 or mu <= 0:
        raise ValueError("epsilon_star needs lam > 0 and mu > 0")
    window = admissible_m_range(n, p, alpha, beta)
    if window is None or not (window[0] < m < window[1]):
        raise ValueError(f"m = {m} outside admissible window {window}")

    def M(eps):
        return float(m_epsilon_value(n, p, alpha, beta, m, eps, lam, mu))

    hi = 1.0
    for _ in range(200):
        if M(hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise RuntimeError("failed to bracket eps*")
    lo = 0.0
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if M(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def epsilon_star_scan(n, p, alpha, beta, m, lam, mu, step: float = 1e-5) -> float:
    """Brute-force sign-scan oracle at fixed resolution (independent of bisection)."""
    hi = 1.0
    while float(m_epsilon_value(n, p, alpha, beta, m, hi, lam, mu)) >= 0.0:
        hi *= 2.0
    eps = np.arange(step, hi + step, step)
    vals = m_epsilon_value(n, p, alpha, beta, m, eps, lam, mu)
    idx = int(np.argmax(vals < 0.0))
    # root is bracketed by the first sign change
    return float(eps[idx]) - 0.5 * step


def default_certification_grid(r_max: float = 1e4, points: int = 4096) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(1e-4, r_max, points - 1)])


def certify(params: SupersolutionParams, grid: Optional[np.ndarray] = None,
            r: Optional[float] = None, safety: float = 0.9) -> Certificate:
    """Certify that v is a strict stationary supersolution; optional decay certificate.

    The analytic bound A*M_eps*(1+rho^q)^{-(m+1)(p-1)} is the certificate; the
    grid positivity of the residual is reported as corroborating evidence.
    """
    if r is None:
        r = params.r
    window = admissible_m_range(params.n, params.p, params.alpha, params.beta, r=r)
    if window is None:
        raise CertificationError("admissible m-window is empty", math.nan)
    if not (window[0] < params.m < window[1]):
        raise CertificationError(f"m = {params.m} outside admissible window {window}", math.nan)
    eps_star = epsilon_star(params.n, params.p, params.alpha, params.beta,
                            params.m, params.lam, params.mu)
    if params.epsilon > safety * eps_star:
        raise CertificationError(
            f"epsilon = {params.epsilon} exceeds safety bound {safety} * eps* = {safety * eps_star}",
            eps_star)

    if grid is None:
        grid = default_certification_grid()
    grid = np.asarray(grid, dtype=float)
    prof = barrier_profile(params, grid)
    residual, bound = prof["residual"], prof["bound"]
    margin = residual - bound

    # exact cancellation check: f was defined as the PDE defect of v
    pde_res = prof["p_laplacian"] + params.lam * prof["v"] ** params.alpha \
        + params.mu * prof["grad_norm"] ** params.beta + residual

    decay = None
    if r is not None:
        tail = grid >= 1.0
        ratios = residual[tail] * grid[tail] ** r
        C = 1.05 * float(ratios.max())
        decay = DecayCertificate(r=float(r), inner_radius=1.0, constant=C, margin=1.05)

    ok = bool(margin.min() >= 0.0 and bound.min() >= 0.0)
    return Certificate(params=params, epsilon_star=eps_star, safety_factor=safety,
                       m_window=window, m_epsilon=float(m_epsilon(params)),
                       grid_points=grid.size, grid_max=float(grid.max()),
                       residual_min=float(residual.min()), bound_min=float(bound.min()),
                       margin_min=float(margin.min()),
                       pde_residual_max=float(np.abs(pde_res).max()),
                       decay=decay, ok=ok)
