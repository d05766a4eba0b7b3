"""Rescaled cutoff test functions and the nonexistence-side integral machinery.

The compactly supported test function is a product of two cutoff powers,

    phi(t, x) = Psi^{a}(t/T) * Phi^{b}(rho),   a = alpha/(alpha-1), b = beta/(beta-p+1),

where the spatial argument rho is either |x|/T^kappa (power rescaling, with the
canonical kappa = alpha*(beta-p+1)/(beta*(alpha-1)) making the two Young-side
integrals scale identically) or ln(|x|/T^theta)/ln(T^theta) (logarithmic
rescaling used exactly at beta = (p-1)n/(n-1), where b = n and the second
integrand reduces to |grad phi|^n / phi^{n-1}).

The two integrals tracked against T are

    I1 = int int |phi_t|^{a} / phi^{a-1},
    I2 = int int |grad phi|^{b} / phi^{c},   c = (p-1)/(beta-p+1),

together with the forcing mass F = int f * Phi^b and U0 = int u0 * phi(0, .).
All quadratures carry the radial weight sphere_area(n) * r^{n-1} and are
refined until 1e-6 relative agreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .problem import ForcingSpec, InitialDataSpec, ProblemSpec, sphere_area
from .quadrature import QuadratureError, radial_nodes, refine_1d, refine_2d, trapezoid_weights

TINY = 1e-300


@dataclass(frozen=True)
class CutoffProfile:
    """Monotone C^1 cutoff: 1 up to plateau_end, quintic smoothstep ramp to 0 at support_end.

    The quintic ramp has vanishing first (and second) derivatives at both
    junctions, which keeps the negative-power integrands integrable at the
    support edge for every alpha > 1.  Values at s < plateau_end are 1, so the
    same profile serves the logarithmic variant whose argument runs over
    (-inf, 1].
    """

    plateau_end: float
    support_end: float

    def __post_init__(self):
        if not self.support_end > self.plateau_end:
            raise ValueError("support_end must exceed plateau_end")

    @property
    def ramp_width(self) -> float:
        return self.support_end - self.plateau_end

    @property
    def max_slope(self) -> float:
        # |d/dt smoothstep| peaks at 15/8 in ramp-normalized coordinates
        return 1.875 / self.ramp_width

    def value(self, s):
        s = np.asarray(s, dtype=float)
        t = np.clip((s - self.plateau_end) / self.ramp_width, 0.0, 1.0)
        ramp = 1.0 - (6.0 * t ** 5 - 15.0 * t ** 4 + 10.0 * t ** 3)
        return np.where(s <= self.plateau_end, 1.0,
                        np.where(s >= self.support_end, 0.0, ramp))

    def slope(self, s):
        s = np.asarray(s, dtype=float)
        t = np.clip((s - self.plateau_end) / self.ramp_width, 0.0, 1.0)
        d = -(30.0 * t ** 4 - 60.0 * t ** 3 + 30.0 * t ** 2) / self.ramp_width
        on_ramp = (s > self.plateau_end) & (s < self.support_end)
        return np.where(on_ramp, d, 0.0)


def default_kappa(alpha: float, beta: float, p: float) -> float:
    """Canonical space rescaling exponent: equalizes the two integral growth rates."""
    return alpha * (beta - p + 1.0) / (beta * (alpha - 1.0))


def max_theta(alpha: float, n: int) -> float:
    """Upper bound on the logarithmic rescaling exponent theta."""
    return alpha / (2.0 * n * (alpha - 1.0))


@dataclass(frozen=True)
class TestFunctionSpec:
    variant: str                      # "power" | "log"
    alpha: float
    beta: float
    p: float
    kappa: Optional[float] = None
    theta: Optional[float] = None
    psi: CutoffProfile = CutoffProfile(0.5, 1.0)
    phi: CutoffProfile = CutoffProfile(0.5, 1.0)

    def __post_init__(self):
        if self.variant not in ("power", "log"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.alpha <= 1.0:
            raise ValueError("alpha > 1 required")
        if self.beta <= self.p - 1.0:
            raise ValueError("beta > p-1 required")
        if self.variant == "power" and self.kappa is None:
            object.__setattr__(self, "kappa", default_kappa(self.alpha, self.beta, self.p))
        if self.variant == "log" and (self.theta is None or self.theta <= 0.0):
            raise ValueError("log variant needs theta > 0")

    @property
    def a(self) -> float:
        return self.alpha / (self.alpha - 1.0)

    @property
    def b(self) -> float:
        return self.beta / (self.beta - self.p + 1.0)

    @property
    def c(self) -> float:
        return (self.p - 1.0) / (self.beta - self.p + 1.0)


def power_spec(alpha: float, beta: float, p: float, kappa: Optional[float] = None,
               psi: Optional[CutoffProfile] = None, phi: Optional[CutoffProfile] = None) -> TestFunctionSpec:
    return TestFunctionSpec(variant="power", alpha=alpha, beta=beta, p=p, kappa=kappa,
                            psi=psi or CutoffProfile(0.5, 1.0),
                            phi=phi or CutoffProfile(0.5, 1.0))


def log_spec(alpha: float, beta: float, p: float, theta: float,
             psi: Optional[CutoffProfile] = None, phi: Optional[CutoffProfile] = None) -> TestFunctionSpec:
    return TestFunctionSpec(variant="log", alpha=alpha, beta=beta, p=p, theta=theta,
                            psi=psi or CutoffProfile(0.5, 1.0),
                            phi=phi or CutoffProfile(0.0, 1.0))


@dataclass(frozen=True)
class IntegralValues:
    I1: float
    I2: float
    F: float
    U0: float
    plateau_forcing_mass: float = 0.0


def rescaled_integrals(spec: TestFunctionSpec, n: int, T: float,
                       forcing: Optional[ForcingSpec] = None,
                       initial: Optional[InitialDataSpec] = None,
                       tol: float = 1e-6) -> IntegralValues:
    """Quadrature values of (I1, I2, F, U0) at one rescaling parameter T."""
    if T < 10.0:
        raise ValueError("T >= 10 required")
    a, b, c = spec.a, spec.b, spec.c
    wn = sphere_area(n)
    psi, phi = spec.psi, spec.phi
    t_end = psi.support_end * T

    if spec.variant == "power":
        Xr = T ** spec.kappa
        r_end = phi.support_end * Xr
        spatial_arg = lambda r: r / Xr
        grad_factor = lambda r: 1.0 / Xr           # |d arg / dr|
        plateau_r = phi.plateau_end * Xr

        def r_nodes(level):
            return np.linspace(0.0, r_end, 257 * 2 ** level + 1)
    else:
        theta = spec.theta
        if theta >= max_theta(spec.alpha, n):
            raise ValueError(f"theta = {theta} violates theta < alpha/(2n(alpha-1)) "
                             f"= {max_theta(spec.alpha, n)}")
        log_scale = theta * math.log(T)
        r_end = T ** (theta * (1.0 + phi.support_end))
        plateau_r = T ** (theta * (1.0 + phi.plateau_end))

        def spatial_arg(r):
            safe = np.maximum(r, TINY)
            return (np.log(safe) - log_scale) / log_scale

        def grad_factor(r):
            return 1.0 / (np.maximum(r, TINY) * log_scale)

        def r_nodes(level):
            return radial_nodes(plateau_r * 1e-5, r_end, 513 * 2 ** level)

    def t_nodes(level):
        return np.linspace(0.0, t_end, 129 * 2 ** level + 1)

    def integrand_I1(t, r):
        ps, dps = psi.value(t / T), psi.slope(t / T)
        ph_b = phi.value(spatial_arg(r)) ** b
        phi_val = ps ** a * ph_b
        num = np.abs(a * ps ** (a - 1.0) * dps / T * ph_b) ** a
        mask = phi_val >= TINY
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(mask, num / phi_val ** (a - 1.0), 0.0)
        return out * wn * r ** (n - 1)

    def integrand_I2(t, r):
        s = spatial_arg(r)
        ps = psi.value(t / T)
        ph = phi.value(s)
        phi_val = ps ** a * ph ** b
        grad = ps ** a * b * ph ** (b - 1.0) * np.abs(phi.slope(s)) * grad_factor(r)
        mask = phi_val >= TINY
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(mask, grad ** b / phi_val ** c, 0.0)
        return out * wn * r ** (n - 1)

    I1 = refine_2d(integrand_I1, t_nodes, r_nodes, tol=tol)
    I2 = refine_2d(integrand_I2, t_nodes, r_nodes, tol=tol)

    F = U0 = plateau_mass = 0.0
    if forcing is not None and forcing.kind != "zero":
        F = _radial_mass(lambda r: forcing.evaluate(r) * phi.value(spatial_arg(r)) ** b,
                         forcing.length_scale, r_end, n, tol)
        plateau_mass = _radial_mass(lambda r: forcing.evaluate(r),
                                    forcing.length_scale, plateau_r, n, tol)
    if initial is not None:
        U0 = _radial_mass(lambda r: initial.evaluate(r) * phi.value(spatial_arg(r)) ** b,
                          initial.length_scale, r_end, n, tol)
    return IntegralValues(I1=I1, I2=I2, F=F, U0=U0, plateau_forcing_mass=plateau_mass)


def _radial_mass(g: Callable, scale: float, r_end: float, n: int, tol: float) -> float:
    wn = sphere_area(n)
    r_lo = min(max(scale, 1e-12), r_end) * 1e-6

    def nodes(level):
        return radial_nodes(r_lo, r_end, 1023 * 2 ** level)

    return refine_1d(lambda r: g(r) * wn * r ** (n - 1), nodes, tol=tol)


def scaling_fit(samples) -> tuple:
    """Least-squares slope of log(value) against log(T); residual = max |log deviation|."""
    samples = sorted(samples)
    if len(samples) < 4:
        raise ValueError("need at least 4 samples")
    T = np.array([s[0] for s in samples], dtype=float)
    V = np.array([s[1] for s in samples], dtype=float)
    if np.any(T <= 0) or np.any(np.diff(T) <= 0):
        raise ValueError("T values must be positive and strictly increasing")
    ratios = T[1:] / T[:-1]
    if ratios.max() > 1.25 * ratios.min():
        raise ValueError("T values must be (approximately) log-spaced")
    if np.any(V <= 0):
        raise ValueError("values must be positive for a log-log fit")
    x, y = np.log(T), np.log(V)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.abs(y - (slope * x + intercept)).max())
    return float(slope), float(intercept), residual


def forcing_mass_lower_bound(forcing: ForcingSpec, T: float, kappa: float, n: int,
                             exponent: float = 1.0,
                             phi: Optional[CutoffProfile] = None,
                             tol: float = 1e-6) -> tuple:
    """Quadrature forcing mass and the closed-form annulus bound C' * T^{(n-r)kappa}.

    Requires the wide cutoff (plateau covering [0, 1]) so the annulus
    T^kappa/2 < |x| < T^kappa sits inside the plateau, and T^kappa >= 2*R0 so
    it sits in the power-law tail of f.
    """
    if forcing.kind != "power-tail":
        raise ValueError("mass lower bound needs a power-tail forcing")
    r_dec = forcing.exponent
    if not 0.0 < r_dec < n:
        raise ValueError(f"bound needs 0 < r < n, got r = {r_dec}")
    phi = phi or CutoffProfile(1.0, 2.0)
    if phi.plateau_end < 1.0:
        raise ValueError("bound needs a cutoff with plateau_end >= 1")
    Xr = T ** kappa
    if Xr < 2.0 * forcing.inner_radius:
        raise ValueError("T^kappa must reach twice the forcing plateau radius")
    mass = _radial_mass(lambda r: forcing.evaluate(r) * phi.value(r / Xr) ** exponent,
                        forcing.length_scale, phi.support_end * Xr, n, tol)
    c_prime = forcing.amplitude * sphere_area(n) * (1.0 - 2.0 ** (-(n - r_dec))) / (n - r_dec)
    bound = c_prime * T ** ((n - r_dec) * kappa)
    if mass < bound:
        raise QuadratureError(f"quadrature mass {mass} fell below the analytic bound {bound}")
    return mass, bound


def _phi_p(s, p):
    out = np.zeros_like(s)
    nz = s != 0.0
    out[nz] = np.abs(s[nz]) ** (p - 2.0) * s[nz]
    return out


def weak_form_gap(trajectory, spec: TestFunctionSpec, problem: ProblemSpec,
                  space_scale: Optional[float] = None,
                  forcing_override: Optional[Callable] = None) -> float:
    """|LHS - RHS| of the weak-solution identity evaluated on stored snapshots.

    LHS = int int [lam|u|^a + mu|grad u|^b + f] phi + int u0 phi(0,.)
    RHS = int int (|grad u|^{p-2} grad u . grad phi - u phi_t)

    Both sides use tensorized trapezoid quadrature in (t, r) with weight
    w_n r^{n-1}; the test function vanishes at the final time and before the
    domain boundary by construction.  `forcing_override(t, r)` replaces the
    problem forcing (testing hook for manufactured solutions).
    """
    times = np.asarray(trajectory.times, dtype=float)
    radii = np.asarray(trajectory.radii, dtype=float)
    U = np.asarray(trajectory.frames, dtype=float)
    if U.shape != (times.size, radii.size):
        raise ValueError("trajectory frames do not match times x radii")
    horizon = times[-1]
    R = radii[-1] + 0.5 * (radii[1] - radii[0])
    if spec.psi.support_end > 1.0:
        raise ValueError("time cutoff must vanish by the trajectory horizon")
    X = space_scale if space_scale is not None else (R - 2.0 * (radii[1] - radii[0])) / spec.phi.support_end
    if spec.phi.support_end * X > R:
        raise ValueError("spatial cutoff support exceeds the trajectory domain")

    n, p, lam, mu = problem.n, problem.p, problem.lam, problem.mu
    a, b = spec.a, spec.b
    wn = sphere_area(n)

    tt = times[:, None]
    rr = radii[None, :]
    ps, dps = spec.psi.value(tt / horizon), spec.psi.slope(tt / horizon)
    ph, dph = spec.phi.value(rr / X), spec.phi.slope(rr / X)
    phi_val = ps ** a * ph ** b
    phi_t = a * ps ** (a - 1.0) * dps / horizon * ph ** b
    phi_r = ps ** a * b * ph ** (b - 1.0) * dph / X

    u_r = np.gradient(U, radii, axis=1)
    if forcing_override is not None:
        f_vals = np.asarray(forcing_override(tt, rr), dtype=float)
        f_vals = np.broadcast_to(f_vals, U.shape)
    else:
        f_vals = np.broadcast_to(problem.forcing.evaluate(radii)[None, :], U.shape)

    weight = wn * radii ** (n - 1)
    wt_t, wt_r = trapezoid_weights(times), trapezoid_weights(radii) * weight

    def integrate(field):
        return float(wt_t @ field @ wt_r)

    lhs = integrate((lam * np.abs(U) ** problem.alpha
                     + mu * np.abs(u_r) ** problem.beta + f_vals) * phi_val)
    lhs += float((U[0] * phi_val[0]) @ wt_r)
    rhs = integrate(_phi_p(u_r, p) * phi_r - U * phi_t)
    return abs(lhs - rhs)
