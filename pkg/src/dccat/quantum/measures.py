"""Cat-state fidelity, Wigner function and parity observables."""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm

from .fock import cat_state, destroy, parity_operator


def cat_fidelity(rho_a: np.ndarray, alpha: complex, parity: str = "even") -> float:
    """F = <C_alpha^pm| rho_a |C_alpha^pm> on the memory mode.

    ``rho_a`` must already be reduced to the memory mode (partial trace over
    buffer/filter first); raises if the truncation cannot hold the cat.
    """
    n = rho_a.shape[0]
    psi = cat_state(n, alpha, parity)
    val = float(np.real(psi.conj() @ rho_a @ psi))
    return min(max(val, 0.0), 1.0)


def displacement(n: int, beta: complex) -> np.ndarray:
    a = destroy(n)
    return expm(beta * a.conj().T - np.conj(beta) * a)


def wigner(
    rho_a: np.ndarray,
    re_axis,
    im_axis,
    norm_warning: float = 0.99,
    pad_to: int | None = None,
):
    """W(beta) = (2/pi) tr(rho D(beta) P D(-beta)) on a rectangular grid.

    The state is zero-padded to ``pad_to`` levels before displacing, so that
    the truncated displacement operator stays faithful out to the grid edge
    (by default enough levels for the displaced state support).  Returns
    (W, warning); the warning flags a grid too small for the state
    (grid-summed integral below ``norm_warning``).  Row i, column j of W
    corresponds to beta = re_axis[j] + i im_axis[i].
    """
    n = rho_a.shape[0]
    re_axis = np.asarray(re_axis, dtype=float)
    im_axis = np.asarray(im_axis, dtype=float)
    r_max = math.hypot(float(np.max(np.abs(re_axis))), float(np.max(np.abs(im_axis))))
    if pad_to is None:
        nbar = max(float(np.real(np.trace(rho_a @ np.diag(np.arange(n))))), 0.0)
        pad_to = max(n, int(math.ceil((r_max + math.sqrt(nbar) + 3.0) ** 2)) + 1)
    big = np.zeros((pad_to, pad_to), dtype=complex)
    big[:n, :n] = rho_a
    signs = (-1.0) ** np.arange(pad_to)
    # D(x + iy) = phase * D(x) D(iy); the phase cancels in D^dag rho D, so
    # the two axis families can be cached (expm per axis value, not per cell)
    d_re = [displacement(pad_to, complex(p, 0.0)) for p in re_axis]
    d_im = [displacement(pad_to, complex(0.0, q)) for q in im_axis]
    w = np.empty((len(im_axis), len(re_axis)))
    for j, dr in enumerate(d_re):
        t_j = dr.conj().T @ big @ dr
        for i, di in enumerate(d_im):
            x = t_j @ di  # tr(rho D P D^dag) = sum_n (-1)^n (D^dag rho D)_nn
            diag = np.einsum("kn,kn->n", di.conj(), x)
            w[i, j] = (2.0 / math.pi) * float(np.real(signs @ diag))
    warning = None
    if len(re_axis) > 1 and len(im_axis) > 1:
        total = float(np.trapezoid(np.trapezoid(w, re_axis, axis=1), im_axis))
        if total < norm_warning:
            warning = (
                f"Wigner grid captures only {total:.4f} of the state; enlarge it"
            )
    return w, warning


def parity_expectation(rho_a: np.ndarray) -> float:
    return float(np.real(np.trace(rho_a @ parity_operator(rho_a.shape[0]))))
