import math

import numpy as np
import pytest

from dccat import derive, reference_params
from dccat.core import TWO_PI
from dccat.quantum import (
    EFFECTIVE_RWA,
    FULL_TIME_DEPENDENT,
    FULL_WITH_FILTER,
    FockOperators,
    HamiltonianSpec,
    QuantumState,
    SolverConfig,
    build_hamiltonian,
    cat_fidelity,
    cat_state,
    coherent_state,
    dephasing_channel_check,
    density,
    evolve,
    parity_expectation,
    parity_operator,
    ptrace_memory,
    trace_distance,
    wigner,
)
from dccat.quantum.dephasing import pure_dephasing_offdiag_decay
from dccat.quantum.fock import MAX_TOTAL_DIM, destroy


def vacuum_rho(ops):
    return density(ops.vacuum())


class TestFockOperators:
    def test_commutator_away_from_edge(self):
        ops = FockOperators((8, 3))
        comm = ops.a @ ops.a.conj().T - ops.a.conj().T @ ops.a
        # exact identity on the subspace excluding the top memory level
        proj = np.ones(8)
        proj[-1] = 0.0
        mask = np.kron(proj, np.ones(3)).astype(bool)
        diag = np.real(np.diag(comm))
        np.testing.assert_allclose(diag[mask], 1.0, atol=1e-12)

    def test_shared_total_dimension(self):
        ops = FockOperators((5, 4, 3))
        assert ops.a.shape == ops.b.shape == ops.c.shape == (60, 60)

    def test_dimension_guard(self):
        with pytest.raises(ValueError, match="guard"):
            FockOperators((MAX_TOTAL_DIM, 2))

    def test_number_operator(self):
        ops = FockOperators((4, 2))
        n_a = ops.number("a")
        want = np.kron(np.diag(np.arange(4.0)), np.eye(2))
        np.testing.assert_allclose(n_a, want, atol=1e-14)


class TestStates:
    def test_coherent_moments(self):
        alpha = 1.1 - 0.4j
        psi = coherent_state(30, alpha)
        a = destroy(30)
        assert psi.conj() @ a @ psi == pytest.approx(alpha, abs=1e-9)

    def test_coherent_truncation_error(self):
        with pytest.raises(ValueError, match="norm"):
            coherent_state(6, 2.5)

    def test_cat_normalization_and_parity(self):
        for parity, sign in (("even", 1.0), ("odd", -1.0)):
            psi = cat_state(25, math.sqrt(5.5), parity)
            assert np.linalg.norm(psi) == pytest.approx(1.0, rel=1e-12)
            par = psi.conj() @ parity_operator(25) @ psi
            assert par.real == pytest.approx(sign, abs=1e-9)

    def test_ptrace_product_state(self):
        ops = FockOperators((8, 3))
        psi_a = coherent_state(8, 0.7)
        psi = np.kron(psi_a, np.eye(3)[1].astype(complex))
        rho_a = ptrace_memory(density(psi), ops.dims)
        np.testing.assert_allclose(rho_a, np.outer(psi_a, psi_a.conj()), atol=1e-12)


class TestHamiltonian:
    def test_diagonal_when_junction_off(self):
        p = reference_params(E_J=0.0, eps_d=0.0)
        ops = FockOperators((4, 2, 2))
        spec = HamiltonianSpec(FULL_TIME_DEPENDENT)
        h = build_hamiltonian(spec, ops, p, 0.37e-9)
        off = h - np.diag(np.diag(h))
        assert np.max(np.abs(off)) < 1e-9
        want = p.omega_a * np.diag(ops.number("a")) + p.omega_b * np.diag(
            ops.number("b")
        )
        np.testing.assert_allclose(np.diag(h).real, want.real, rtol=1e-12)

    def test_effective_g2_matrix_element(self):
        # coefficient of a^dag^2 b: <2_a 0_b| H |0_a 1_b> = sqrt(2) g2
        dp = derive(reference_params())
        p = reference_params(eps_d=0.0)
        ops = FockOperators((5, 3))
        h = build_hamiltonian(HamiltonianSpec(EFFECTIVE_RWA), ops, p, 0.0)
        bra = 2 * 3 + 0  # |n_a=2, n_b=0>
        ket = 0 * 3 + 1  # |n_a=0, n_b=1>
        got = h[bra, ket] / math.sqrt(2.0)
        assert abs(got) / TWO_PI == pytest.approx(8.95e6, rel=5e-3)
        assert got == pytest.approx(dp.g2, rel=1e-10)

    def test_cosine_scalar_limit(self):
        p = reference_params(phi_zpf_a=0.0, phi_zpf_b=0.0, eps_d=0.0)
        ops = FockOperators((4, 2))
        t = 0.21e-9
        h = build_hamiltonian(HamiltonianSpec(FULL_TIME_DEPENDENT), ops, p, t)
        want = (
            p.omega_a * ops.number("a")
            + p.omega_b * ops.number("b")
            - p.E_J * math.cos(p.omega_dc * t) * np.eye(8)
        )
        np.testing.assert_allclose(h, want, atol=1e-6)

    def test_hermitian(self):
        p = reference_params(eps_d=1e6 + 5e5j)
        ops = FockOperators((5, 3))
        for kind in (FULL_TIME_DEPENDENT, EFFECTIVE_RWA):
            h = build_hamiltonian(HamiltonianSpec(kind), ops, p, 0.13e-9)
            scale = np.max(np.abs(h))
            assert np.max(np.abs(h - h.conj().T)) < 1e-12 * scale

    def test_filter_consistency_enforced(self):
        p = reference_params()  # kappa_b = 2pi x 20 MHz
        ops = FockOperators((4, 2, 2))
        good = HamiltonianSpec(
            FULL_WITH_FILTER, g_bc=TWO_PI * 20e6, kappa_c=TWO_PI * 80e6
        )
        build_hamiltonian(good, ops, p, 0.0)
        bad = HamiltonianSpec(
            FULL_WITH_FILTER, g_bc=TWO_PI * 10e6, kappa_c=TWO_PI * 80e6
        )
        with pytest.raises(ValueError, match="kappa_b"):
            build_hamiltonian(bad, ops, p, 0.0)

    def test_ramp_profile(self):
        spec = HamiltonianSpec(EFFECTIVE_RWA, ramp_time=10e-9)
        assert spec.ramp(0.0) == 0.0
        assert spec.ramp(5e-9) == pytest.approx(0.5)
        assert spec.ramp(20e-9) == 1.0


class TestEvolve:
    def test_frozen_when_generator_zero(self):
        p = reference_params(E_J=0.0, kappa_b=0.0, eps_d=0.0)
        ops = FockOperators((3, 2))
        psi = np.kron(coherent_state(3, 0.4, 1e-2), np.eye(2)[0]).astype(complex)
        rho0 = density(psi)
        # diagonal H only dephases in the Fock basis; remove it too
        p0 = reference_params(E_J=0.0, kappa_b=0.0)
        spec = HamiltonianSpec(EFFECTIVE_RWA)  # g2 = 0 when phi_zpf = 0
        p0 = reference_params(phi_zpf_a=0.0, phi_zpf_b=0.0, kappa_b=0.0, eps_d=0.0)
        states = evolve(rho0, spec, ops, p0, np.linspace(0.0, 1e-7, 5))
        for s in states:
            np.testing.assert_allclose(s.rho, rho0, atol=1e-10)

    def test_single_mode_decay_exact(self):
        # effective kind with g2 = 0: buffer relaxes at kappa_b
        p = reference_params(phi_zpf_a=0.0, phi_zpf_b=0.0, eps_d=0.0)
        ops = FockOperators((2, 6))
        psi = np.kron(np.eye(2)[0], coherent_state(6, 0.9, 1e-3)).astype(complex)
        rho0 = density(psi)
        ts = np.linspace(0.0, 30e-9, 7)
        states = evolve(rho0, spec=HamiltonianSpec(EFFECTIVE_RWA), ops=ops, params=p, t_eval=ts)
        n_b = ops.number("b")
        n0 = float(np.real(np.trace(rho0 @ n_b)))
        for s in states:
            got = float(np.real(np.trace(s.rho @ n_b)))
            want = n0 * math.exp(-p.kappa_b * s.time)
            assert got == pytest.approx(want, rel=1e-6, abs=1e-9)

    def test_invalid_rho_rejected(self):
        p = reference_params()
        ops = FockOperators((3, 2))
        bad = np.eye(6, dtype=complex)  # trace 6
        with pytest.raises(ValueError, match="density"):
            evolve(bad, HamiltonianSpec(EFFECTIVE_RWA), ops, p, [0.0, 1e-9])

    def test_validity_invariants_along_preparation(self):
        dp = derive(reference_params())
        p = reference_params(eps_d=2.0 * abs(dp.g2))
        ops = FockOperators((12, 4))
        spec = HamiltonianSpec(EFFECTIVE_RWA, ramp_time=40e-9)
        ts = np.linspace(0.0, 150e-9, 11)
        states = evolve(density(ops.vacuum()), spec, ops, p, ts)
        for s in states:
            s.validate(trace_tol=1e-6)

    def test_parity_conserved_by_effective_model(self):
        dp = derive(reference_params())
        p = reference_params(eps_d=2.0 * abs(dp.g2))
        ops = FockOperators((12, 4))
        spec = HamiltonianSpec(EFFECTIVE_RWA, ramp_time=40e-9)
        ts = np.linspace(0.0, 150e-9, 6)
        states = evolve(density(ops.vacuum()), spec, ops, p, ts)
        pars = [parity_expectation(ptrace_memory(s.rho, ops.dims)) for s in states]
        assert max(abs(v - 1.0) for v in pars) < 1e-3

    def test_truncation_doubling_converged(self):
        # doubling either dim moves the final fidelity by < 0.2%
        dp = derive(reference_params())
        nbar = 2.0
        p = reference_params(eps_d=nbar * abs(dp.g2))
        target = math.sqrt(nbar) * complex(
            math.cos(math.pi / 4), math.sin(math.pi / 4)
        )

        def final_fidelity(dims):
            ops = FockOperators(dims)
            spec = HamiltonianSpec(EFFECTIVE_RWA, ramp_time=50e-9)
            ts = np.linspace(0.0, 50e-9 + 12.0 / dp.kappa_2, 8)
            states = evolve(density(ops.vacuum()), spec, ops, p, ts)
            return cat_fidelity(ptrace_memory(states[-1].rho, dims), target, "even")

        base = final_fidelity((12, 4))
        assert abs(final_fidelity((24, 4)) - base) < 2e-3
        assert abs(final_fidelity((12, 8)) - base) < 2e-3

    def test_five_and_half_photon_preparation(self):
        # drive set for 5.5 prepared photons: the amplitude-dependent
        # correction to the exchange rate renormalizes |alpha_ss|^2 by
        # 1/(1 - phi_a^2 nbar / 3) at first order
        dp = derive(reference_params())
        nbar = 5.5
        p = reference_params()
        eps_d = nbar * abs(dp.g2) * (1.0 - p.phi_zpf_a**2 * nbar / 3.0)
        p = reference_params(eps_d=eps_d)
        ops = FockOperators((26, 5))
        spec = HamiltonianSpec(EFFECTIVE_RWA, ramp_time=100e-9)
        ts = np.linspace(0.0, 100e-9 + 6.0 / dp.kappa_2, 7)
        states = evolve(density(ops.vacuum()), spec, ops, p, ts)
        rho_a = ptrace_memory(states[-1].rho, ops.dims)
        target = math.sqrt(nbar) * complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
        assert cat_fidelity(rho_a, target, "even") > 0.99
        n_op = np.diag(np.arange(26.0))
        assert float(np.real(np.trace(rho_a @ n_op))) == pytest.approx(nbar, rel=0.02)

    def test_checkpoint_io(self, tmp_path):
        ops = FockOperators((3, 2))
        state = QuantumState(vacuum_rho(ops), 1.5e-9)
        f = tmp_path / "state.npz"
        state.save(f, ops.dims)
        loaded, dims = QuantumState.load(f)
        assert dims == (3, 2)
        assert loaded.time == 1.5e-9
        np.testing.assert_array_equal(loaded.rho, state.rho)

    def test_solver_config_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(method="rk45")


class TestFilterMode:
    def test_effective_linewidth(self):
        # probe decay of the buffer through the filter fits kappa_b +- 10%
        p = reference_params(phi_zpf_a=0.0, phi_zpf_b=0.0, eps_d=0.0)
        ops = FockOperators((4, 5, 5))
        spec = HamiltonianSpec(
            FULL_WITH_FILTER, g_bc=TWO_PI * 20e6, kappa_c=TWO_PI * 80e6
        )
        psi = np.kron(
            np.eye(4)[0], np.kron(coherent_state(5, 0.6, 1e-3), np.eye(5)[0])
        ).astype(complex)
        # fit over [0, 2/kappa_b]
        ts = np.linspace(0.0, 2.0 / p.kappa_b, 9)
        states = evolve(density(psi), spec, ops, p, ts)
        n_b = ops.number("b")
        pops = np.array([np.real(np.trace(s.rho @ n_b)) for s in states])
        rate = -np.polyfit(ts, np.log(pops), 1)[0]
        assert rate == pytest.approx(p.kappa_b, rel=0.10)


class TestCatFidelity:
    def test_exact_cat_is_one(self):
        psi = cat_state(25, math.sqrt(5.5), "even")
        assert cat_fidelity(density(psi), math.sqrt(5.5), "even") == pytest.approx(
            1.0, abs=1e-12
        )

    def test_vacuum_overlap_oracle(self):
        # direct inner-product oracle: F = |<C+|0>|^2 = 4 N+^2 e^{-|a|^2}
        a2 = 5.5
        n_plus_sq = 1.0 / (2.0 * (1.0 + math.exp(-2.0 * a2)))
        want = 4.0 * n_plus_sq * math.exp(-a2)
        assert want == pytest.approx(0.0082, abs=5e-5)
        rho = np.zeros((25, 25), dtype=complex)
        rho[0, 0] = 1.0
        got = cat_fidelity(rho, math.sqrt(a2), "even")
        assert got == pytest.approx(want, rel=1e-6)

    def test_equal_mixture_oracle(self):
        # closed form: F = (1 + q)/2 with q = e^{-2|alpha|^2}
        a = math.sqrt(2.0)
        q = math.exp(-2.0 * a * a)
        rho = 0.5 * (
            density(coherent_state(20, a)) + density(coherent_state(20, -a))
        )
        assert cat_fidelity(rho, a, "even") == pytest.approx((1.0 + q) / 2.0, abs=1e-9)


class TestWigner:
    def test_vacuum_peak(self):
        rho = np.zeros((10, 10), dtype=complex)
        rho[0, 0] = 1.0
        w, warn = wigner(rho, [0.0], [0.0])
        assert w[0, 0] == pytest.approx(2.0 / math.pi, rel=1e-9)
        assert warn is None  # single point skips the norm check

    def test_even_cat_center_parity(self):
        a = math.sqrt(5.5)
        rho = density(cat_state(24, a, "even"))
        w, _ = wigner(rho, [0.0], [0.0])
        # W(0) = (2/pi) <P> = +2/pi for even parity
        assert w[0, 0] == pytest.approx(2.0 / math.pi, rel=1e-6)
        par = parity_expectation(rho)
        assert w[0, 0] == pytest.approx(2.0 / math.pi * par, rel=1e-9)

    def test_coherent_displaced_gaussian(self):
        alpha = -1.25 + 0.0j
        rho = density(coherent_state(18, alpha))
        xs = np.linspace(-2.5, 2.5, 21)
        w, _ = wigner(rho, xs, [0.0])
        assert xs[np.argmax(w[0])] == pytest.approx(alpha.real, abs=0.15)
        assert np.max(w[0]) == pytest.approx(2.0 / math.pi, rel=1e-3)

    def test_normalization_and_grid_warning(self):
        rho = density(coherent_state(14, 1.0))
        xs = np.linspace(-4.0, 4.0, 41)
        w, warn = wigner(rho, xs, xs)
        assert warn is None
        total = np.trapezoid(np.trapezoid(w, xs, axis=1), xs)
        assert total == pytest.approx(1.0, abs=0.01)
        _, warn_small = wigner(rho, np.linspace(-0.5, 0.5, 9), np.linspace(-0.5, 0.5, 9))
        assert warn_small is not None


class TestDephasing:
    def test_zero_kappa_phi_distance_vanishes(self):
        dp = derive(reference_params())
        rep = dephasing_channel_check(
            dp.g2,
            reference_params().kappa_b,
            0.0,
            0.2e-6,
            dims=(8, 2),
            n_seeds=10,
            hold_dt=1e-9,
            alpha0=0.8 + 0.0j,
            n_checkpoints=3,
        )
        assert rep["max_distance"] < 1e-10

    def test_small_ensemble_rejected(self):
        with pytest.raises(ValueError, match="10"):
            dephasing_channel_check(1e6j, 1e8, 1e5, 1e-7, n_seeds=5)

    def test_pure_dephasing_offdiagonal_decay_exact(self):
        # kappa_phi D[n] alone: rho_nm(t) = rho_nm(0) e^{-kphi (n-m)^2 t/2}
        from scipy.linalg import expm

        from dccat.quantum.dephasing import _dephasing_dissipator

        n = 6
        kphi = TWO_PI * 0.2e6
        t = 0.8e-6
        rho0 = density(coherent_state(n, 0.8, 1e-2))
        n_op = np.diag(np.arange(n)).astype(complex)
        liou = kphi * _dephasing_dissipator(n_op)
        rho_t = (expm(liou * t) @ rho0.ravel()).reshape(n, n)
        want = rho0 * pure_dephasing_offdiag_decay(n, kphi, t)
        np.testing.assert_allclose(rho_t, want, atol=1e-12)

    def test_stochastic_matches_lindblad(self):
        dp = derive(reference_params())
        rep = dephasing_channel_check(
            dp.g2,
            reference_params().kappa_b,
            TWO_PI * 0.16e6,
            0.4e-6,
            dims=(10, 3),
            n_seeds=40,
            hold_dt=1e-9,
            alpha0=1.2 * complex(math.cos(math.pi / 4), math.sin(math.pi / 4)),
            n_checkpoints=4,
        )
        assert rep["max_distance"] < 0.05


def test_trace_distance_basics():
    rho1 = np.diag([1.0, 0.0]).astype(complex)
    rho2 = np.diag([0.5, 0.5]).astype(complex)
    assert trace_distance(rho1, rho1) == 0.0
    assert trace_distance(rho1, rho2) == pytest.approx(0.5)
