import cmath
import math
from math import factorial

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from dccat import (
    ParameterError,
    bessel_j,
    derive,
    locked_junction_coefficients,
    pump_expansion_coefficients,
    reference_params,
)
from dccat.core import TWO_PI


def bessel_series_oracle(n, x, terms=20):
    """Independent power-series evaluation used to freeze expected values."""
    return sum(
        (-1.0) ** m * (x / 2.0) ** (2 * m + n) / (factorial(m) * factorial(m + n))
        for m in range(terms)
    )


class TestDerive:
    def test_g2_baseline(self, baseline_derived):
        assert abs(baseline_derived.g2) / TWO_PI == pytest.approx(8.95e6, rel=5e-3)

    def test_g2_phase_exact(self, baseline_derived):
        assert cmath.phase(baseline_derived.g2) == -math.pi / 2.0

    def test_kappa2_baseline(self, baseline_derived):
        assert baseline_derived.kappa_2 / TWO_PI == pytest.approx(16.0e6, rel=1e-2)

    def test_nu0_and_rc_cutoff(self):
        p = reference_params(R0=100.0, C0=15.9e-12)
        dp = derive(p)
        assert dp.nu_0 / TWO_PI == pytest.approx(224e6, rel=5e-3)
        assert 1.0 / (TWO_PI * dp.tau) == pytest.approx(100e6, rel=5e-3)

    def test_noise_rates(self, baseline_derived):
        # sigma = 2pi x 0.1 GHz, dt = 0.01 ns
        assert baseline_derived.T_d == pytest.approx(625e-9, rel=2e-2)
        assert 1.0 / baseline_derived.T_d == pytest.approx(1.6e6, rel=2e-2)
        assert baseline_derived.kappa_phi / TWO_PI == pytest.approx(0.157e6, rel=2e-2)

    def test_zero_coupling_limit(self):
        p = reference_params(phi_zpf_a=0.0, phi_zpf_b=0.0)
        dp = derive(p)
        assert dp.g2 == 0.0
        assert dp.E_J_tilde == p.E_J

    def test_e_j_tilde_bounded(self, baseline, baseline_derived):
        assert 0.0 < baseline_derived.E_J_tilde <= baseline.E_J

    def test_g2_hierarchy(self, baseline, baseline_derived):
        dp = baseline_derived
        assert dp.g2_a == -(baseline.phi_zpf_a**2 / 3.0) * dp.g2
        assert dp.g2_b == -(baseline.phi_zpf_b**2 / 2.0) * dp.g2

    def test_alpha_ss_modulus(self):
        dp0 = derive(reference_params())
        eps_d = 5.5 * abs(dp0.g2)
        dp = derive(reference_params(eps_d=eps_d))
        assert abs(dp.alpha_ss) ** 2 == pytest.approx(abs(eps_d / dp.g2), rel=1e-12)
        # real positive drive puts the cat angle at pi/4
        assert cmath.phase(dp.alpha_ss) == pytest.approx(math.pi / 4.0, abs=1e-12)

    def test_alpha_ss_steady_exact(self):
        dp0 = derive(reference_params())
        p = reference_params(eps_d=3.0 * abs(dp0.g2))
        dp = derive(p)
        # alpha_ss^2 g2* + eps_d = 0 identically
        assert dp.alpha_ss**2 * dp.g2.conjugate() + p.eps_d == pytest.approx(0.0, abs=1e-6)

    def test_xi_cancels_drive(self, baseline, baseline_derived):
        # xi_a(t) = xi_a1 e^{-i w t} + xi_a2 e^{+i w t} must solve
        # xi' = -i omega_a xi + i phi_a E_J_tilde sin(omega_dc t)
        dp = baseline_derived
        w = baseline.omega_dc
        drive = baseline.phi_zpf_a * dp.E_J_tilde
        assert 1j * (baseline.omega_a - w) * dp.xi_a1 == pytest.approx(-drive / 2.0)
        assert 1j * (baseline.omega_a + w) * dp.xi_a2 == pytest.approx(drive / 2.0)
        driveb = baseline.phi_zpf_b * dp.E_J_tilde
        assert 1j * (baseline.omega_b - w) * dp.xi_b1 == pytest.approx(-driveb / 2.0)
        assert dp.xi_bar_a == dp.xi_a1 + dp.xi_a2.conjugate()

    def test_third_order_detunings(self, baseline, baseline_derived):
        p, dp = baseline, baseline_derived
        assert dp.delta_A == 0.0  # eps_L = 0 here
        pl = reference_params(R0=100.0, C0=15.9e-12, eps_L=0.1)
        dpl = derive(pl)
        assert dpl.delta_A == pytest.approx(pl.E_J * pl.phi_zpf_a**2 * 0.1 / 2.0)
        assert dpl.delta_B1 == pytest.approx(pl.E_J * pl.phi_zpf_b**2 * 0.1 / 2.0)
        assert dpl.delta_B2 == pytest.approx(
            (p.kappa_b / 2.0) * (p.kappa_b / (4.0 * p.omega_b))
        )

    def test_kappa_b_zero_flags_undefined(self):
        dp = derive(reference_params(kappa_b=0.0))
        assert math.isnan(dp.kappa_2)
        assert any("kappa_2" in w for w in dp.warnings)

    def test_matching_violation_warns(self):
        p = reference_params(omega_dc=TWO_PI * 7.05e9, omega_L=TWO_PI * 7.05e9, matched=False)
        dp = derive(p)
        assert any("matching" in w for w in dp.warnings)

    def test_deterministic_and_pure(self, baseline):
        a = derive(baseline, noise_sigma=1.0, noise_dt=2e-11)
        b = derive(baseline, noise_sigma=1.0, noise_dt=2e-11)
        assert a == b


class TestCoreInvariants:
    @given(
        sigma=st.floats(1e3, 1e12),
        dt=st.floats(1e-13, 1e-9),
    )
    @settings(max_examples=50, deadline=None)
    def test_kappa_phi_T_d_identity(self, sigma, dt):
        dp = derive(reference_params(), noise_sigma=sigma, noise_dt=dt)
        assert dp.kappa_phi * dp.T_d == pytest.approx(math.pi**2 / 16.0, rel=1e-12)

    @given(scale=st.floats(0.2, 3.0), pa=st.floats(0.01, 0.5), pb=st.floats(0.01, 0.5))
    @settings(max_examples=50, deadline=None)
    def test_kappa2_kappa_b_identity(self, scale, pa, pb):
        p = reference_params(kappa_b=scale * TWO_PI * 20e6, phi_zpf_a=pa, phi_zpf_b=pb)
        dp = derive(p)
        assert dp.kappa_2 * p.kappa_b == pytest.approx(4.0 * abs(dp.g2) ** 2, rel=1e-14)

    @given(pa=st.floats(0.01, 0.9), pb=st.floats(0.01, 0.9))
    @settings(max_examples=50, deadline=None)
    def test_g2_phase_always(self, pa, pb):
        dp = derive(reference_params(phi_zpf_a=pa, phi_zpf_b=pb))
        assert cmath.phase(dp.g2) == -math.pi / 2.0


class TestValidation:
    def test_negative_frequency_rejected(self):
        with pytest.raises(ParameterError, match="omega_a"):
            reference_params(omega_a=-1.0)

    def test_phi_zpf_range(self):
        with pytest.raises(ParameterError, match="phi_zpf_a"):
            reference_params(phi_zpf_a=1.2)

    def test_c0_required_with_r0(self):
        with pytest.raises(ParameterError, match="C0"):
            reference_params(R0=50.0)

    def test_matched_flag_enforced(self):
        with pytest.raises(ParameterError, match="matched"):
            reference_params(omega_dc=TWO_PI * 7.01e9)

    def test_unmatched_allowed_when_flag_off(self):
        p = reference_params(omega_dc=TWO_PI * 7.01e9, matched=False)
        assert p.matching_residual == pytest.approx(TWO_PI * 0.01e9)

    def test_delta_omega_consistency(self):
        with pytest.raises(ParameterError, match="delta_omega"):
            reference_params(delta_omega=123.0)
        p = reference_params(omega_dc=TWO_PI * 7.0e9 + 1e3, matched=True)
        assert p.delta_omega == pytest.approx(1e3)

    def test_replace_recomputes_delta_omega(self, baseline):
        p = baseline.replace(omega_L=baseline.omega_L - 5e3)
        assert p.delta_omega == pytest.approx(5e3)


class TestBessel:
    def test_against_series_oracle(self):
        for n in range(4):
            for x in (0.0, 0.05, 0.1, 0.3, 0.5, 1.0):
                assert bessel_j(n, x) == pytest.approx(
                    bessel_series_oracle(n, x), abs=1e-14
                )

    def test_against_scipy(self):
        xs = np.linspace(0.0, 2.0, 21)
        for n in range(5):
            want = scipy.special.jv(n, xs)
            got = np.array([bessel_j(n, x) for x in xs])
            np.testing.assert_allclose(got, want, atol=1e-12)


class TestPumpExpansion:
    def test_zero_pump(self):
        terms = pump_expansion_coefficients(0.0, 3)
        assert terms[0].amplitude == -1.0
        assert terms[0].parity == "cos"
        assert all(t.amplitude == 0.0 for t in terms[1:])

    def test_small_pump_values(self):
        # frozen from the power-series oracle (20 terms)
        j0 = bessel_series_oracle(0, 0.1)
        j1 = bessel_series_oracle(1, 0.1)
        j2 = bessel_series_oracle(2, 0.1)
        assert j0 == pytest.approx(0.99750, abs=1e-5)
        assert j1 == pytest.approx(0.04994, abs=1e-5)
        assert j2 == pytest.approx(0.00125, abs=1e-5)
        terms = pump_expansion_coefficients(0.1, 2)
        assert terms[0].amplitude == pytest.approx(-j0, rel=1e-12)
        assert terms[1].amplitude == pytest.approx(2.0 * j1, rel=1e-12)
        assert terms[1].parity == "sin"
        assert terms[2].amplitude == pytest.approx(2.0 * j2, rel=1e-12)
        assert terms[2].parity == "cos"

    def test_stationary_part_dominates(self):
        terms = pump_expansion_coefficients(0.1, 6)
        assert abs(terms[0].amplitude) > max(abs(t.amplitude) for t in terms[1:])

    def test_harmonic_labels(self):
        terms = pump_expansion_coefficients(0.2, 5)
        assert [t.harmonic for t in terms] == list(range(6))


class TestLockedJunction:
    def test_identity_at_zero(self, baseline_derived):
        lc = locked_junction_coefficients(baseline_derived, 0.0)
        assert lc.g2 == baseline_derived.g2
        assert lc.g2_a == baseline_derived.g2_a
        assert lc.delta_a2 == baseline_derived.delta_a2

    def test_first_order_scale(self, baseline_derived):
        # oracle: J0(0.1) + J1(0.1)
        scale = scipy.special.jv(0, 0.1) + scipy.special.jv(1, 0.1)
        assert scale == pytest.approx(1.0474391, abs=1e-6)
        lc = locked_junction_coefficients(baseline_derived, 0.1)
        assert lc.g2 == pytest.approx(scale * baseline_derived.g2, rel=1e-9)
        assert lc.g2_b == pytest.approx(scale * baseline_derived.g2_b, rel=1e-9)

    def test_second_order_scale(self, baseline_derived):
        # oracle: J0(0.1) (J0(0.1) - 2 J1(0.1)) = 0.8953838...
        j0, j1 = scipy.special.jv(0, 0.1), scipy.special.jv(1, 0.1)
        scale = j0 * (j0 - 2.0 * j1)
        assert scale == pytest.approx(0.8953838, abs=1e-6)
        lc = locked_junction_coefficients(baseline_derived, 0.1)
        assert lc.delta_a2 == pytest.approx(scale * baseline_derived.delta_a2, rel=1e-9)
        assert lc.delta_b2 == pytest.approx(scale * baseline_derived.delta_b2, rel=1e-9)

    def test_large_cj_rejected(self, baseline_derived):
        with pytest.raises(ValueError):
            locked_junction_coefficients(baseline_derived, 1.5)
