import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pcrit import barrier
from pcrit.problem import ForcingSpec, InitialDataSpec, ProblemSpec
from pcrit.solver import RadialGrid
from pcrit.testfuncs import (CutoffProfile, default_kappa, forcing_mass_lower_bound,
                             log_spec, max_theta, power_spec, rescaled_integrals,
                             scaling_fit, weak_form_gap)


class TestCutoffProfile:
    def test_plateau_support_and_range(self):
        prof = CutoffProfile(0.5, 1.0)
        s = np.linspace(-1.0, 2.0, 10_000)
        vals = prof.value(s)
        assert np.all(vals[s <= 0.5] == 1.0)
        assert np.all(vals[s >= 1.0] == 0.0)
        assert np.all((0.0 <= vals) & (vals <= 1.0))

    def test_monotone_nonincreasing(self):
        prof = CutoffProfile(1.0, 2.0)
        vals = prof.value(np.linspace(0.0, 2.5, 10_000))
        assert np.all(np.diff(vals) <= 1e-15)

    def test_c1_junctions(self):
        # finite-difference derivative is continuous across both junctions
        prof = CutoffProfile(0.5, 1.0)
        h = 1e-6
        for s0 in (0.5, 1.0):
            left = (prof.value(s0) - prof.value(s0 - h)) / h
            right = (prof.value(s0 + h) - prof.value(s0)) / h
            assert abs(left - right) < 1e-8

    def test_slope_matches_fd(self):
        prof = CutoffProfile(0.0, 1.0)
        s = np.linspace(0.05, 0.95, 37)
        h = 1e-6
        fd = (prof.value(s + h) - prof.value(s - h)) / (2 * h)
        assert np.allclose(prof.slope(s), fd, atol=1e-7)

    def test_negative_argument_is_plateau(self):
        prof = CutoffProfile(0.0, 1.0)
        assert prof.value(-1e9) == 1.0

    @given(st.floats(min_value=-5, max_value=5), st.floats(min_value=0.001, max_value=5))
    def test_pairwise_monotone(self, s, ds):
        prof = CutoffProfile(0.5, 1.0)
        assert prof.value(s + ds) <= prof.value(s) + 1e-15


class TestSpecIdentities:
    def test_kappa_identity(self):
        # kappa * beta/(beta-p+1) == alpha/(alpha-1) for the canonical kappa
        for alpha, beta, p in ((4.0, 3.0, 2.0), (6.0, 4.0, 2.5), (3.0, 2.8, 1.9)):
            spec = power_spec(alpha, beta, p)
            assert spec.kappa * spec.b == pytest.approx(spec.a, abs=1e-12)

    def test_critical_beta_reduces_exponents(self):
        # at beta = (p-1)n/(n-1): b = n and c = n-1 exactly
        for n, p in ((3, 2.0), (4, 2.5), (5, 1.8)):
            beta = (p - 1.0) * n / (n - 1.0)
            spec = log_spec(4.0, beta, p, theta=0.01)
            assert spec.b == pytest.approx(n, abs=1e-12)
            assert spec.c == pytest.approx(n - 1, abs=1e-12)

    def test_default_kappa_value(self):
        assert default_kappa(4.0, 3.0, 2.0) == pytest.approx(8 / 9, abs=1e-15)

    def test_log_variant_rejects_large_theta(self):
        spec = log_spec(4.0, 1.5, 2.0, theta=0.9 * max_theta(4.0, 3) * 3)
        with pytest.raises(ValueError):
            rescaled_integrals(spec, 3, 1e3)


class TestScalingFit:
    def test_pure_power_law(self):
        samples = [(10.0 ** k, 5.0 * (10.0 ** k) ** 2.5) for k in range(2, 7)]
        slope, _, resid = scaling_fit(samples)
        assert slope == pytest.approx(2.5, abs=1e-9)
        assert resid < 1e-10

    def test_log_corrected_decay_approaches_minus_one(self):
        def value(T):
            return (1.0 + 1.0 / math.log(T)) / T

        near, _, _ = scaling_fit([(10.0 ** k, value(10.0 ** k)) for k in range(4, 9)])
        far, _, _ = scaling_fit([(10.0 ** k, value(10.0 ** k)) for k in range(2, 7)])
        assert abs(near + 1.0) < 0.02
        assert abs(near + 1.0) < abs(far + 1.0)

    def test_constant_samples(self):
        slope, _, _ = scaling_fit([(10.0 ** k, 3.7) for k in range(2, 6)])
        assert slope == pytest.approx(0.0, abs=1e-12)

    def test_rejects_nonpositive_values(self):
        with pytest.raises(ValueError):
            scaling_fit([(10.0 ** k, -1.0) for k in range(2, 6)])

    def test_rejects_short_series(self):
        with pytest.raises(ValueError):
            scaling_fit([(10.0, 1.0), (100.0, 2.0), (1000.0, 3.0)])


class TestRescaledIntegrals:
    def test_power_slopes_match_theory(self):
        spec = power_spec(4.0, 3.0, 2.0)
        rows = [(T, rescaled_integrals(spec, 3, T)) for T in (1e2, 1e3, 1e4, 1e5)]
        s1, _, _ = scaling_fit([(T, v.I1) for T, v in rows])
        s2, _, _ = scaling_fit([(T, v.I2) for T, v in rows])
        theory = spec.kappa * 3 + 1 - spec.a
        assert s1 == pytest.approx(theory, abs=0.01)
        assert s2 == pytest.approx(s1, abs=0.01)

    def test_resolution_doubling_invariance(self):
        spec = power_spec(4.0, 3.0, 2.0)
        coarse = rescaled_integrals(spec, 3, 1e4, tol=1e-6)
        fine = rescaled_integrals(spec, 3, 1e4, tol=1e-8)
        assert coarse.I1 == pytest.approx(fine.I1, rel=1e-6)
        assert coarse.I2 == pytest.approx(fine.I2, rel=1e-6)

    def test_log_variant_gradient_bound(self):
        # |grad Phi(s(x))| <= C/(|x| ln T) with C from the ramp slope
        theta = 0.5 * max_theta(4.0, 3)
        spec = log_spec(4.0, 1.5, 2.0, theta=theta)
        T = 1e5
        log_scale = theta * math.log(T)
        r = np.geomspace(T ** theta * 0.5, T ** (2 * theta) * 1.1, 2000)
        s = (np.log(r) - log_scale) / log_scale
        grad_phi = np.abs(spec.phi.slope(s)) / (r * log_scale)
        C = spec.phi.max_slope / theta
        assert np.all(grad_phi <= C / (r * math.log(T)) * (1 + 1e-12))

    def test_log_variant_masses(self):
        theta = 0.5 * max_theta(4.0, 3)
        spec = log_spec(4.0, 1.5, 2.0, theta=theta)
        forcing = ForcingSpec.gaussian(1.0, 1.0)
        initial = InitialDataSpec.gaussian(2.0, 1.0)
        vals = rescaled_integrals(spec, 3, 1e4, forcing=forcing, initial=initial)
        # plateau radius far exceeds the Gaussian scale, so F ~ full mass ~ pi^{3/2}
        assert vals.F == pytest.approx(math.pi ** 1.5, rel=1e-3)
        assert vals.U0 == pytest.approx(2.0 * math.pi ** 1.5, rel=1e-3)
        # plateau ball (radius T^theta ~ 2.8) misses a little Gaussian tail mass
        assert vals.plateau_forcing_mass == pytest.approx(math.pi ** 1.5, rel=5e-3)

    def test_rejects_small_T(self):
        with pytest.raises(ValueError):
            rescaled_integrals(power_spec(4.0, 3.0, 2.0), 3, 5.0)


class TestForcingMassBound:
    def test_worked_annulus_bound(self):
        forcing = ForcingSpec.power_tail(1.0, 2.0, 1.0)
        mass, bound = forcing_mass_lower_bound(forcing, 1e4, 8 / 9, 3)
        # C' = w_3 (1 - 2^{-1}) / 1 = 2 pi, bound = 2 pi T^{8/9}
        assert bound == pytest.approx(2 * math.pi * (1e4) ** (8 / 9), rel=1e-12)
        assert mass >= bound

    def test_linear_in_amplitude(self):
        f1 = ForcingSpec.power_tail(1.0, 2.0, 1.0)
        f2 = ForcingSpec.power_tail(2.0, 2.0, 1.0)
        m1, b1 = forcing_mass_lower_bound(f1, 1e3, 8 / 9, 3)
        m2, b2 = forcing_mass_lower_bound(f2, 1e3, 8 / 9, 3)
        assert m2 == pytest.approx(2 * m1, rel=1e-9)
        assert b2 == pytest.approx(2 * b1, rel=1e-12)

    def test_exponent_continuity_toward_n(self):
        # (n-r) kappa -> 0: the bound ratio across decades flattens
        f_slow = ForcingSpec.power_tail(1.0, 2.999, 1.0)
        _, b_lo = forcing_mass_lower_bound(f_slow, 1e2, 8 / 9, 3)
        _, b_hi = forcing_mass_lower_bound(f_slow, 1e6, 8 / 9, 3)
        assert b_hi / b_lo < 1.01
        f_fast = ForcingSpec.power_tail(1.0, 2.0, 1.0)
        _, c_lo = forcing_mass_lower_bound(f_fast, 1e2, 8 / 9, 3)
        _, c_hi = forcing_mass_lower_bound(f_fast, 1e6, 8 / 9, 3)
        assert c_hi / c_lo > 1e3

    def test_rejects_decay_outside_range(self):
        with pytest.raises(ValueError):
            forcing_mass_lower_bound(ForcingSpec.power_tail(1.0, 3.5, 1.0), 1e3, 8 / 9, 3)


def _barrier_params():
    es = barrier.epsilon_star(3, 2.0, 4.0, 3.0, 0.4, 1.0, 1.0)
    return barrier.SupersolutionParams(n=3, p=2.0, alpha=4.0, beta=3.0, lam=1.0, mu=1.0,
                                       m=0.4, epsilon=0.9 * es)


class TestWeakFormGap:
    def test_identically_zero(self):
        grid = RadialGrid(R=20.0, N=128)
        traj = SimpleNamespace(times=np.linspace(0, 1, 9), radii=grid.centers,
                               frames=np.zeros((9, 128)))
        spec = ProblemSpec(n=3, p=2.0, lam=1.0, mu=1.0, alpha=4.0, beta=3.0,
                           forcing=ForcingSpec.zero(), initial=InitialDataSpec.constant(0.0))
        assert weak_form_gap(traj, power_spec(4.0, 3.0, 2.0), spec) == 0.0

    def test_manufactured_solution_order(self):
        # u(t, r) = e^{-t} v(r) with the exact (time-dependent) defect as forcing
        params = _barrier_params()
        spec = ProblemSpec(n=3, p=2.0, lam=1.0, mu=1.0, alpha=4.0, beta=3.0,
                           forcing=ForcingSpec.residual(params),
                           initial=InitialDataSpec.barrier_fraction(1.0, params))
        tf = power_spec(4.0, 3.0, 2.0)

        def gap_at(N, K):
            grid = RadialGrid(R=20.0, N=N)
            times = np.linspace(0.0, 1.0, K)
            prof = barrier.barrier_profile(params, grid.centers)
            frames = np.exp(-times)[:, None] * prof["v"][None, :]
            traj = SimpleNamespace(times=times, radii=grid.centers, frames=frames)

            def defect(t, r):
                pr = barrier.barrier_profile(params, r[0] if r.ndim > 1 else r)
                return (-np.exp(-t) * pr["v"] - np.exp(-t) * pr["p_laplacian"]
                        - np.exp(-4.0 * t) * pr["v"] ** 4
                        - np.exp(-3.0 * t) * pr["grad_norm"] ** 3)

            return weak_form_gap(traj, tf, spec, forcing_override=defect)

        gaps = [gap_at(128, 17), gap_at(256, 33), gap_at(512, 65)]
        orders = np.log2(np.array(gaps[:-1]) / np.array(gaps[1:]))
        assert np.all(orders >= 1.0)

    def test_support_mismatch_reported(self):
        grid = RadialGrid(R=20.0, N=128)
        traj = SimpleNamespace(times=np.linspace(0, 1, 9), radii=grid.centers,
                               frames=np.zeros((9, 128)))
        spec = ProblemSpec(n=3, p=2.0, lam=1.0, mu=1.0, alpha=4.0, beta=3.0,
                           forcing=ForcingSpec.zero(), initial=InitialDataSpec.constant(0.0))
        with pytest.raises(ValueError):
            weak_form_gap(traj, power_spec(4.0, 3.0, 2.0), spec, space_scale=100.0)
