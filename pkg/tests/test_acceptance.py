"""Acceptance gate: every criterion at its stated tolerance, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion lines.
"""

import math
import time

import numpy as np

from pcrit import barrier, testfuncs
from pcrit.exponents import first_critical
from pcrit.problem import ForcingSpec, InitialDataSpec, ProblemSpec
from pcrit.solver import RadialGrid, SolverConfig, compare_to_supersolution, run
from pcrit.sweep import SweepPlan, run_sweep
from pcrit.testfuncs import (forcing_mass_lower_bound, log_spec, max_theta,
                             power_spec, rescaled_integrals, scaling_fit,
                             weak_form_gap)


def _report(criterion: int, ok: bool, runtime: float, limit: float, detail: str):
    line = (f"criterion {criterion:2d}: {'PASS' if ok and runtime < limit else 'FAIL'} "
            f"({runtime:.2f}s / limit {limit:.0f}s) - {detail}")
    print(line)
    assert ok, detail
    assert runtime < limit, f"runtime {runtime:.2f}s exceeded {limit}s"


def _barrier_instance(m=0.4):
    eps_star = barrier.epsilon_star(3, 2.0, 4.0, 3.0, m, 1.0, 1.0)
    return barrier.SupersolutionParams(n=3, p=2.0, alpha=4.0, beta=3.0, lam=1.0,
                                       mu=1.0, m=m, epsilon=0.9 * eps_star), eps_star


def test_criterion_1_classifier_fidelity():
    t0 = time.perf_counter()
    ok, detail = True, ""
    for n in range(3, 21):
        ce = first_critical(n, 2.0)
        if ce.alpha_cr != n / (n - 2) or ce.beta_cr != n / (n - 1):
            ok, detail = False, f"mismatch at n = {n}"
            break
    for n, p in ((3, 2.0), (5, 3.0), (4, 2.5)):
        ce = first_critical(n, p)
        want = ((p - 1) * n / (n - p), (p - 1) * n / (n - 1))
        if abs(ce.alpha_cr - want[0]) > 1e-12 or abs(ce.beta_cr - want[1]) > 1e-12:
            ok, detail = False, f"threshold mismatch at (n, p) = ({n}, {p})"
    _report(1, ok, time.perf_counter() - t0, 1.0,
            detail or "first_critical exact on 3<=n<=20 at p=2 and three (n,p) pairs")


def test_criterion_2_supersolution_certificate():
    t0 = time.perf_counter()
    params, _ = _barrier_instance(m=0.4)
    cert = barrier.certify(params)
    ok = cert.ok and cert.grid_points == 4096 and cert.margin_min >= 0.0 \
        and cert.bound_min >= 0.0

    radii = np.geomspace(1e-2, 1e3, 64)
    prof = barrier.barrier_profile(params, radii)

    def v_at(r):
        return barrier.barrier_profile(params, r)["v"]

    errs = []
    for h_fac in (1e-4, 5e-5):
        h = np.maximum(radii, 1.0) * h_fac
        fd = np.abs((v_at(radii + h) - v_at(radii - h)) / (2 * h))
        errs.append(np.abs(fd - prof["grad_norm"]))
    grad_order = float(np.median(np.log2(errs[0] / np.maximum(errs[1], 1e-300))))

    lin = np.linspace(0.5, 20.0, 40)
    exact = barrier.barrier_profile(params, lin)["p_laplacian"]

    def disc(h):
        sp = (v_at(lin + h) - v_at(lin)) / h
        sm = (v_at(lin) - v_at(lin - h)) / h
        return ((lin + h / 2) ** 2 * sp - (lin - h / 2) ** 2 * sm) / (lin ** 2 * h)

    e1 = np.abs(disc(1e-2) - exact)
    e2 = np.abs(disc(5e-3) - exact)
    lap_order = float(np.median(np.log2(e1 / np.maximum(e2, 1e-300))))
    orders_ok = 1.8 <= grad_order <= 2.2 and 1.8 <= lap_order <= 2.2
    _report(2, ok and orders_ok, time.perf_counter() - t0, 5.0,
            f"residual >= bound >= 0 on all 4096 radii; FD orders "
            f"grad {grad_order:.2f}, p-laplacian {lap_order:.2f}")


def test_criterion_3_epsilon_star_oracle():
    t0 = time.perf_counter()
    es = barrier.epsilon_star(5, 2.0, 4.0, 3.0, 1.0, 1.0, 1.0)
    ok = abs(es - 0.4855) <= 1e-3
    detail = f"eps*(5,2,m=1,4,3) = {es:.6f}"
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(3, 7))
        p = float(rng.uniform(2.0 * n / (n + 1) + 0.05, min(3.0, n - 0.2)))
        ce = first_critical(n, p)
        alpha = ce.alpha_cr * float(rng.uniform(1.1, 2.5))
        beta = ce.beta_cr * float(rng.uniform(1.1, 2.5))
        lo, hi = barrier.admissible_m_range(n, p, alpha, beta)
        m = lo + float(rng.uniform(0.2, 0.8)) * (hi - lo)
        lam, mu = float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.5, 2.0))
        diff = abs(barrier.epsilon_star(n, p, alpha, beta, m, lam, mu)
                   - barrier.epsilon_star_scan(n, p, alpha, beta, m, lam, mu))
        worst = max(worst, diff)
    ok = ok and worst <= 2e-5
    _report(3, ok, time.perf_counter() - t0, 5.0,
            detail + f"; worst |bisection - scan| = {worst:.2e} over 20 draws")


def test_criterion_4_subcritical_scaling_law():
    t0 = time.perf_counter()
    spec = power_spec(4.0, 3.0, 2.0)
    rows = [(T, rescaled_integrals(spec, 3, T)) for T in (1e2, 1e3, 1e4, 1e5, 1e6)]
    s1, _, _ = scaling_fit([(T, v.I1) for T, v in rows])
    s2, _, _ = scaling_fit([(T, v.I2) for T, v in rows])
    theory = spec.kappa * 3 + 1 - spec.a  # = 7/3
    ok = abs(s1 - theory) <= 0.05 and abs(s1 - s2) <= 0.05
    _report(4, ok, time.perf_counter() - t0, 60.0,
            f"I1 slope {s1:.4f} vs theory {theory:.4f}; I2 slope {s2:.4f}")


def test_criterion_5_critical_logarithmic_rate():
    t0 = time.perf_counter()
    beta_cr = 1.5  # (p-1) n/(n-1) at n = 3, p = 2
    spec = log_spec(4.0, beta_cr, 2.0, theta=0.5 * max_theta(4.0, 3))
    rows = [(T, rescaled_integrals(spec, 3, T)) for T in (1e3, 1e4, 1e5, 1e6, 1e7)]
    x = np.log([math.log(T) for T, _ in rows])
    y = np.log([v.I2 / T for T, v in rows])
    slope = float(np.polyfit(x, y, 1)[0])
    ok = abs(slope - (1 - 3)) <= 0.1
    _report(5, ok, time.perf_counter() - t0, 60.0,
            f"log(I2/T) vs log ln T slope {slope:.4f} vs theory -2")


def test_criterion_6_forcing_mass_bound():
    t0 = time.perf_counter()
    forcing = ForcingSpec.power_tail(1.0, 2.0, 1.0)
    ok, detail = True, ""
    for T in (1e2, 1e3, 1e4, 1e5, 1e6):
        mass, bound = forcing_mass_lower_bound(forcing, T, 8 / 9, 3)
        want = 2 * math.pi * T ** (8 / 9)  # C' = w_3 (1 - 2^{-1}) / (n - r) = 2 pi
        if abs(bound - want) > 1e-9 * want or mass < bound:
            ok, detail = False, f"failed at T = {T:g}"
            break
    _report(6, ok, time.perf_counter() - t0, 10.0,
            detail or "mass >= 2*pi*T^{8/9} at every sampled T, C' in closed form")


def test_criterion_7_blow_up_reproduction():
    t0 = time.perf_counter()
    spec = ProblemSpec(n=3, p=2.0, lam=1.0, mu=1.0, alpha=2.0, beta=4.0,
                       forcing=ForcingSpec.gaussian(1.0, 1.0),
                       initial=InitialDataSpec.gaussian(1.0, 1.0))
    config = SolverConfig(t_max=50.0)
    v512, _ = run(spec, RadialGrid(R=40.0, N=512), config)
    v1024, _ = run(spec, RadialGrid(R=40.0, N=1024), config)
    ok = (v512.outcome == "blow-up" and v1024.outcome == "blow-up"
          and v512.t_blow is not None and v512.t_blow < 50.0)
    shift = abs(v512.t_blow - v1024.t_blow) / v1024.t_blow if ok else math.inf
    ok = ok and shift < 0.20
    _report(7, ok, time.perf_counter() - t0, 120.0,
            f"t_blow N=512: {v512.t_blow:.3f}, N=1024: {v1024.t_blow:.3f}, "
            f"shift {100 * shift:.1f}%")


def test_criterion_8_global_containment():
    t0 = time.perf_counter()
    params, _ = _barrier_instance(m=0.4)
    spec = ProblemSpec(n=3, p=2.0, lam=1.0, mu=1.0, alpha=4.0, beta=3.0,
                       forcing=ForcingSpec.residual(params),
                       initial=InitialDataSpec.barrier_fraction(0.5, params))
    verdict, traj = run(spec, RadialGrid(R=40.0, N=512), SolverConfig(t_max=100.0))
    excess = compare_to_supersolution(traj, params)
    ok = verdict.outcome == "global-bounded" and excess <= 1e-3 * params.epsilon
    _report(8, ok, time.perf_counter() - t0, 120.0,
            f"verdict {verdict.outcome}; max(u - v) = {excess:.2e} "
            f"<= {1e-3 * params.epsilon:.2e}")


def test_criterion_9_weak_form_gap():
    t0 = time.perf_counter()
    params, _ = _barrier_instance(m=0.4)
    spec = ProblemSpec(n=3, p=2.0, lam=1.0, mu=1.0, alpha=4.0, beta=3.0,
                       forcing=ForcingSpec.residual(params),
                       initial=InitialDataSpec.barrier_fraction(1.0, params))
    tf = power_spec(4.0, 3.0, 2.0)
    gaps = []
    for N, K in ((128, 17), (256, 33), (512, 65)):
        _, traj = run(spec, RadialGrid(R=20.0, N=N),
                      SolverConfig(t_max=1.0, snapshot_count=K))
        gaps.append(weak_form_gap(traj, tf, spec))
    orders = np.log2(np.array(gaps[:-1]) / np.array(gaps[1:]))
    ok = bool(np.all(np.diff(gaps) < 0) and np.all(orders >= 1.0))
    _report(9, ok, time.perf_counter() - t0, 120.0,
            f"gaps {gaps[0]:.2e} -> {gaps[1]:.2e} -> {gaps[2]:.2e}, "
            f"orders {orders[0]:.2f}, {orders[1]:.2f}")


def test_criterion_10_second_exponent_sweep():
    t0 = time.perf_counter()
    template = ProblemSpec(n=3, p=2.0, lam=1.0, mu=1.0, alpha=4.0, beta=3.0,
                           forcing=ForcingSpec.power_tail(1.0, 2.0, 1.0),
                           initial=InitialDataSpec.gaussian(0.1, 1.0))
    plan = SweepPlan.make(alphas=[4.0], betas=[3.0], rs=[-1.0, 1.0, 2.0, 8 / 3, 2.8],
                          template=template, grid=RadialGrid(40.0, 64),
                          config=SolverConfig(t_max=1.0), classification_only=True)
    records = run_sweep(plan)
    got = [(rec.r, rec.prediction.verdict, rec.prediction.clause) for rec in records]
    want = [(-1.0, "nonexistence-global", "Thm2(iii)"),
            (1.0, "nonexistence-global", "Thm2(i)"),
            (2.0, "nonexistence-global", "Thm2(i)"),
            (8 / 3, "global-possible", "Thm2(ii)"),
            (2.8, "global-possible", "Thm2(ii)")]
    ok = got == want
    _report(10, ok, time.perf_counter() - t0, 1.0,
            "predictions flip exactly at r* = 8/3; r = -1 fires Thm2(iii)")
