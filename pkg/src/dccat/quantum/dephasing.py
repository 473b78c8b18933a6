"""Noise-dephasing equivalence check.

A DC-frequency noise term (delta_omega_N(t)/2) a^dag a averaged over
realizations is equivalent to the Lindblad channel kappa_phi D[a^dag a] with
kappa_phi = sigma^2 hold_dt / 4.  This module propagates both sides on the
same time grid: the Lindblad side with the exact per-interval propagator
expm((L0 + kappa_phi D[n]) dt), the stochastic side with Strang-split noise
phases around expm(L0 dt), and reports the trace distance between the
ensemble mean and the Lindblad state at checkpoints.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm

from ..noise import NoiseModel
from .fock import FockOperators, cat_state, density, trace_distance


def liouvillian_matrix(h: np.ndarray, collapses) -> np.ndarray:
    """Dense superoperator of -i[H, .] + sum_k kappa_k D[L_k] (row-major vec)."""
    dim = h.shape[0]
    eye = np.eye(dim, dtype=complex)
    liou = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for L, kappa in collapses:
        if kappa == 0.0:
            continue
        LdL = L.conj().T @ L
        liou += kappa * (
            np.kron(L, L.conj())
            - 0.5 * np.kron(LdL, eye)
            - 0.5 * np.kron(eye, LdL.T)
        )
    return liou


def dephasing_channel_check(
    g2: complex,
    kappa_b: float,
    kappa_phi: float,
    t_span: float,
    dims=(12, 3),
    n_seeds: int = 200,
    hold_dt: float = 1e-9,
    alpha0: complex = None,  # type: ignore[assignment]
    n_checkpoints: int = 8,
    seed0: int = 1000,
) -> dict:
    """Trace distance between the noise-ensemble mean and the dephasing
    Lindbladian at checkpoints over [0, t_span].

    The stochastic runs use hold-sampled Gaussian noise with
    sigma = 2 sqrt(kappa_phi / hold_dt), the exact counterpart of the
    requested kappa_phi.
    """
    if n_seeds < 10:
        raise ValueError("ensemble too small: need at least 10 seeds")
    ops = FockOperators(dims)
    dim = ops.total_dim
    if alpha0 is None:
        alpha0 = math.sqrt(2.0) * complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
    psi_a = cat_state(dims[0], alpha0, "even")
    psi = np.zeros(dim, dtype=complex)
    rest = dim // dims[0]
    psi[::rest] = psi_a  # tensor with the b-mode vacuum
    rho0 = density(psi)

    h0 = g2 * (ops.a.conj().T @ ops.a.conj().T @ ops.b)
    h0 = h0 + h0.conj().T
    n_a = ops.number("a")
    liou0 = liouvillian_matrix(h0, [(ops.b, kappa_b)])
    prop0 = expm(liou0 * hold_dt)
    prop_deph = expm((liou0 + kappa_phi * _dephasing_dissipator(n_a)) * hold_dt)

    n_steps = int(round(t_span / hold_dt))
    check_every = max(1, n_steps // n_checkpoints)
    sigma = 2.0 * math.sqrt(kappa_phi / hold_dt)
    draws = np.stack(
        [
            NoiseModel("white_hold", sigma=sigma, hold_dt=hold_dt, seed=seed0 + s).draws(
                0, n_steps
            )
            for s in range(n_seeds)
        ]
    )

    na_diag = np.real(np.diag(n_a))
    batch = np.broadcast_to(rho0, (n_seeds, dim, dim)).copy()
    rho_l = rho0.ravel().copy()

    times = [0.0]
    distances = [0.0]
    for k in range(n_steps):
        theta = draws[:, k] * hold_dt / 4.0  # (delta_omega/2) * (dt/2)
        phase = np.exp(-1j * theta[:, None] * na_diag[None, :])
        batch *= phase[:, :, None] * phase.conj()[:, None, :]
        flat = (prop0 @ batch.reshape(n_seeds, dim * dim).T).T
        batch = flat.reshape(n_seeds, dim, dim).copy()
        batch *= phase[:, :, None] * phase.conj()[:, None, :]
        rho_l = prop_deph @ rho_l
        if (k + 1) % check_every == 0 or k == n_steps - 1:
            mean = batch.mean(axis=0)
            times.append((k + 1) * hold_dt)
            distances.append(trace_distance(mean, rho_l.reshape(dim, dim)))

    return {
        "times": np.array(times),
        "trace_distance": np.array(distances),
        "n_seeds": n_seeds,
        "hold_dt": hold_dt,
        "sigma": sigma,
        "kappa_phi": kappa_phi,
        "dims": tuple(dims),
        "max_distance": float(np.max(distances)),
    }


def _dephasing_dissipator(n_op: np.ndarray) -> np.ndarray:
    dim = n_op.shape[0]
    eye = np.eye(dim, dtype=complex)
    n_sq = n_op @ n_op
    return (
        np.kron(n_op, n_op.conj())
        - 0.5 * np.kron(n_sq, eye)
        - 0.5 * np.kron(eye, n_sq.T)
    )


def pure_dephasing_offdiag_decay(n: int, kappa_phi: float, t: float) -> np.ndarray:
    """Exact |rho_nm(t)/rho_nm(0)| factor e^{-kappa_phi (n-m)^2 t / 2}."""
    k = np.arange(n)
    diff = k[:, None] - k[None, :]
    return np.exp(-0.5 * kappa_phi * diff.astype(float) ** 2 * t)
