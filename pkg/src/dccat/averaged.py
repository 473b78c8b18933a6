"""Hierarchy of averaged classical models and their steady-state analysis.

Three concrete models are carried:

* ``cat_first_order`` -- the two-mode exchange dynamics
  alpha' = -2i g2 alpha* beta,
  beta'  = -i g2* alpha^2 - (kappa_b/2) beta - i eps_d.
* ``locking_R_only`` / ``locking_RC`` -- the junction-phase dynamics with a
  bare series resistance (Adler form, with its -nu_0^2/(2 omega_L) frequency
  shift) or with the parallel RC branch.
* ``third_order_full`` -- the four-variable model coupling both mechanisms,
  with the locking-tone detunings Delta_A, Delta_B1, the damping-induced
  Delta_B2, and the e^{+-i phi_J} phases on the exchange terms.

Coefficients are closed forms hard-coded from the derivations; no symbolic
averaging machinery lives here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .core import CircuitParams, DerivedParams, derive

CAT_FIRST_ORDER = "cat_first_order"
LOCKING_R_ONLY = "locking_R_only"
LOCKING_RC = "locking_RC"
THIRD_ORDER_FULL = "third_order_full"

_ORDERS = (CAT_FIRST_ORDER, LOCKING_R_ONLY, LOCKING_RC, THIRD_ORDER_FULL)


@dataclass(frozen=True)
class EffectiveModel:
    """Coefficient set of one averaged model, tagged with the provenance of
    the CircuitParams it was derived from.

    ``phi_ref`` is the locked junction-phase reference; the locked value pi
    enters the cat dynamics as a phase on g2.
    """

    order: str
    g2: complex = 0.0j
    kappa_b: float = 0.0
    eps_d: complex = 0.0j
    delta_omega: float = 0.0
    nu_0: float = 0.0
    eps_L: float = 0.0
    omega_L: float = 0.0
    tau: float = 0.0
    Delta_A: float = 0.0
    Delta_B1: float = 0.0
    Delta_B2: float = 0.0
    kappa_over_4omega_b: float = 0.0
    phi_ref: float = 0.0
    provenance: str = ""

    def __post_init__(self):
        if self.order not in _ORDERS:
            raise ValueError(f"unknown model order {self.order!r}")

    @property
    def g2_eff(self) -> complex:
        """Exchange rate with the locked-phase reference folded in."""
        if self.phi_ref == 0.0:
            return self.g2
        return self.g2 * cmath.exp(1j * self.phi_ref)

    @property
    def alpha_ss(self) -> complex:
        if self.g2_eff == 0:
            return 0.0j
        return cmath.sqrt(-self.eps_d / self.g2_eff.conjugate())

    def without_corrections(self) -> "EffectiveModel":
        """Copy with every locking/damping correction zeroed (reduces
        third_order_full to the bare cat model)."""
        return replace(
            self,
            eps_L=0.0,
            Delta_A=0.0,
            Delta_B1=0.0,
            Delta_B2=0.0,
            kappa_over_4omega_b=0.0,
        )


def effective_model(
    params: CircuitParams,
    order: str,
    derived: DerivedParams | None = None,
    phi_ref: float = 0.0,
) -> EffectiveModel:
    """Build the coefficient set for ``order`` from one CircuitParams."""
    dp = derived if derived is not None else derive(params)
    return EffectiveModel(
        order=order,
        g2=dp.g2,
        kappa_b=params.kappa_b,
        eps_d=params.eps_d,
        delta_omega=params.delta_omega,
        nu_0=dp.nu_0,
        eps_L=params.eps_L,
        omega_L=params.omega_L,
        tau=params.tau,
        Delta_A=dp.delta_A,
        Delta_B1=dp.delta_B1,
        Delta_B2=dp.delta_B2,
        kappa_over_4omega_b=params.kappa_b / (4.0 * params.omega_b),
        phi_ref=phi_ref,
        provenance=dp.provenance,
    )


def rhs_cat(alpha: complex, beta: complex, model: EffectiveModel):
    """First-order averaged two-mode dynamics."""
    if model.order != CAT_FIRST_ORDER:
        raise ValueError("model order must be cat_first_order")
    g2 = model.g2_eff
    dalpha = -2j * g2 * alpha.conjugate() * beta
    dbeta = -1j * g2.conjugate() * alpha * alpha - 0.5 * model.kappa_b * beta - 1j * model.eps_d
    return dalpha, dbeta


def rhs_locking(state, model: EffectiveModel):
    """Averaged junction-phase dynamics.

    R only: phi' = delta_omega - nu_0^2/(2 omega_L) + (eps_L nu_0 / 2) sin phi.
    RC:     phi' = delta_omega - z/tau,  z' = -z/tau - (eps_L nu_0 / 2) sin phi.
    """
    half_lock = 0.5 * model.eps_L * model.nu_0
    if model.order == LOCKING_R_ONLY:
        phi = float(state) if np.isscalar(state) else float(state[0])
        return (
            model.delta_omega
            - model.nu_0**2 / (2.0 * model.omega_L)
            + half_lock * math.sin(phi)
        )
    if model.order == LOCKING_RC:
        phi, z = float(state[0]), float(state[1])
        dphi = model.delta_omega - z / model.tau
        dz = -z / model.tau - half_lock * math.sin(phi)
        return dphi, dz
    raise ValueError("model order must be a locking model")


def rhs_third_order(state, model: EffectiveModel):
    """Third-order averaged model for (alpha, beta, n_R, phi_J_hat).

    With eps_L, the Deltas and the kappa_b/(4 omega_b) correction all zero
    and phi_J_hat = 0 this coincides exactly with rhs_cat.
    """
    if model.order != THIRD_ORDER_FULL:
        raise ValueError("model order must be third_order_full")
    alpha, beta, n_R, phi = state
    g2 = model.g2
    cphi = math.cos(phi)
    ephi = cmath.exp(1j * phi)
    kb4w = model.kappa_over_4omega_b
    # cat terms first, in the same order as rhs_cat, so that zeroed
    # corrections reduce to it bit-exactly
    dalpha = -2j * g2 * ephi * alpha.conjugate() * beta + 1j * model.Delta_A * cphi * alpha
    dbeta = (
        -1j * g2.conjugate() / ephi * alpha * alpha
        - 0.5 * model.kappa_b * beta
        - 1j * model.eps_d
        + 1j * model.Delta_B1 * cphi * beta
        + 1j * model.Delta_B2 * beta
        - kb4w * model.eps_d
    )
    if model.tau > 0.0:
        inv_tau = 1.0 / model.tau
        lock_cos = model.nu_0 * model.eps_L / (2.0 * model.tau * model.omega_L) * cphi
        dn_R = (
            -n_R * inv_tau
            - lock_cos
            - 0.5
            * model.nu_0
            * model.eps_L
            * math.sin(phi)
            * (1.0 - (model.delta_omega - n_R * inv_tau) / model.omega_L)
        )
        dphi = -n_R * inv_tau - lock_cos + model.delta_omega
    else:
        dn_R = 0.0
        dphi = model.delta_omega
    return dalpha, dbeta, dn_R, dphi


def cat_equilibria(model: EffectiveModel):
    """The three steady states of the first-order cat model:
    (+alpha_ss, 0), (-alpha_ss, 0) and the unstable (0, -2i eps_d/kappa_b)."""
    a = model.alpha_ss
    branch = -2j * model.eps_d / model.kappa_b if model.kappa_b > 0 else 0.0j
    return [(a, 0.0j), (-a, 0.0j), (0.0j, branch)]


def stability(
    model: EffectiveModel,
    equilibrium: str = "cat",
    phi_bar: float = math.pi,
    asymptotic: bool = False,
):
    """Linearization eigenvalues at a named equilibrium.

    ``cat``: the exact pair -kappa_b/4 +- (kappa_b/4) sqrt(1 - 4 |g2 alpha_ss|^2
    / (kappa_b/4)^2); with ``asymptotic`` the kappa_b >> kappa_2 |alpha_ss|^2
    limit (-kappa_b/2, -2 kappa_2 |alpha_ss|^2).  ``origin``: the
    conjugate-linear growth pair +-|2 g2 beta_ss| of the undriven mode.
    ``locking``: (-1/tau, (eps_L nu_0/2) cos(phi_bar)).
    """
    if equilibrium == "cat":
        if model.kappa_b <= 0.0:
            raise ValueError("cat-branch stability needs kappa_b > 0")
        q = abs(model.g2) * abs(model.alpha_ss)
        quarter = model.kappa_b / 4.0
        if asymptotic:
            kappa_2 = 4.0 * abs(model.g2) ** 2 / model.kappa_b
            return (-2.0 * kappa_2 * abs(model.alpha_ss) ** 2, -model.kappa_b / 2.0)
        x = (2.0 * q / quarter) ** 2
        if x <= 1.0:
            # cancellation-free form of -quarter (1 - sqrt(1 - x))
            root = math.sqrt(1.0 - x)
            return (-quarter * x / (1.0 + root), -quarter * (1.0 + root))
        root = quarter * cmath.sqrt(complex(1.0 - x))
        return (-quarter + root, -quarter - root)
    if equilibrium == "origin":
        rate = abs(2.0 * model.g2 * (-2j * model.eps_d / model.kappa_b))
        return (rate, -rate, -model.kappa_b / 2.0)
    if equilibrium == "locking":
        if model.tau <= 0.0:
            raise ValueError("locking stability needs tau > 0")
        return (-1.0 / model.tau, 0.5 * model.eps_L * model.nu_0 * math.cos(phi_bar))
    raise ValueError(f"unknown equilibrium label {equilibrium!r}")


def third_order_steady_state(model: EffectiveModel, phi_hat: float):
    """Cat-branch steady state of the third-order model at frozen phi_J_hat.

    Closed-form solution of
      (r^2 + (kappa_b - 2i Delta_B) Delta_A cos(phi)/(4i |g2|^2)) e^{2i theta}
        = -eps_d e^{i phi} (1 - i kappa_b/(4 omega_b)) / g2*,
    polished by damped Newton to residual < 1e-12 of the dominant rate.
    Returns (alpha_ss, beta_ss).
    """
    if model.order != THIRD_ORDER_FULL:
        raise ValueError("model order must be third_order_full")
    g2 = model.g2
    if g2 == 0:
        raise ValueError("g2 must be nonzero")
    cphi = math.cos(phi_hat)
    delta_B = model.Delta_B1 * cphi + model.Delta_B2
    K = (model.kappa_b - 2j * delta_B) * model.Delta_A * cphi / (4j * abs(g2) ** 2)
    rhs = (
        -model.eps_d
        * cmath.exp(1j * phi_hat)
        * (1.0 - 1j * model.kappa_over_4omega_b)
        / g2.conjugate()
    )
    R = abs(rhs)
    if R == 0.0:
        return 0.0j, 0.0j
    gamma = math.asin(max(-1.0, min(1.0, K.imag / R)))
    theta = 0.5 * (cmath.phase(rhs) - gamma)
    r_sq = R * math.cos(gamma) - K.real
    if r_sq < 0.0:
        raise ValueError("no cat-branch steady state: detunings too large")
    alpha = math.sqrt(r_sq) * cmath.exp(1j * theta)
    beta = model.Delta_A * cphi * cmath.exp(2j * theta - 1j * phi_hat) / (2.0 * g2)

    # Damped Newton polish on the stacked real system (numerical Jacobian).
    scale = max(abs(model.eps_d), abs(g2) * max(r_sq, 1.0))
    target = 1e-12 * max(scale, 1.0)

    def f(x):
        al = x[0] + 1j * x[1]
        be = x[2] + 1j * x[3]
        da, db, _, _ = rhs_third_order((al, be, 0.0, phi_hat), model)
        return np.array([da.real, da.imag, db.real, db.imag])

    x = np.array([alpha.real, alpha.imag, beta.real, beta.imag])
    for _ in range(50):
        fx = f(x)
        if np.max(np.abs(fx)) < target:
            break
        jac = np.empty((4, 4))
        h = 1e-7 * max(1.0, np.max(np.abs(x)))
        for j in range(4):
            xp = x.copy()
            xp[j] += h
            jac[:, j] = (f(xp) - fx) / h
        step = np.linalg.solve(jac, fx)
        lam = 1.0
        while lam > 1e-4 and np.max(np.abs(f(x - lam * step))) > np.max(np.abs(fx)):
            lam *= 0.5
        x = x - lam * step
    return complex(x[0], x[1]), complex(x[2], x[3])


def integrate_cat(
    model: EffectiveModel,
    alpha0: complex,
    beta0: complex,
    t_eval,
    rtol=1e-10,
    atol=1e-12,
    ramp_time: float = 0.0,
):
    """Integrate the first-order cat model at the requested times.

    ``ramp_time`` applies the same linear drive switch-on as the full
    integrator (absolute time)."""

    def f(t, y):
        m = model
        if ramp_time > 0.0 and t < ramp_time:
            m = replace(model, eps_d=model.eps_d * (t / ramp_time))
        da, db = rhs_cat(complex(y[0], y[1]), complex(y[2], y[3]), m)
        return [da.real, da.imag, db.real, db.imag]

    t_eval = np.asarray(t_eval, dtype=float)
    sol = solve_ivp(
        f,
        (t_eval[0], t_eval[-1]),
        [alpha0.real, alpha0.imag, beta0.real, beta0.imag],
        t_eval=t_eval,
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:  # pragma: no cover
        raise RuntimeError(f"averaged-model integration failed: {sol.message}")
    return sol.y[0] + 1j * sol.y[1], sol.y[2] + 1j * sol.y[3]


def compare_to_full(model: EffectiveModel, traj, window=None, ramp_time: float = 0.0) -> dict:
    """Rotating-frame RMS deviation between the averaged cat model and a full
    classical trajectory over ``window`` = (t_start, t_stop).

    The averaged model is launched from the trajectory's rotating-frame state
    at the window start (with the same drive ramp, if any); errors are
    normalized by the peak |alpha| (or |beta|) over the window.  Raises on
    provenance mismatch.
    """
    if model.provenance and model.provenance != traj.params.provenance():
        raise ValueError("model and trajectory come from different parameter sets")
    t = traj.times
    if window is None:
        window = (t[0], t[-1])
    mask = (t >= window[0]) & (t <= window[1])
    ts = t[mask]
    if len(ts) < 2:
        raise ValueError("window contains too few samples")
    alpha_full = traj.alpha_rot()[mask]
    beta_full = traj.beta_rot()[mask]
    alpha_avg, beta_avg = integrate_cat(
        model, alpha_full[0], beta_full[0], ts, ramp_time=ramp_time
    )
    scale_a = max(np.max(np.abs(alpha_full)), 1e-30)
    scale_b = max(np.max(np.abs(beta_full)), 1e-30)
    return {
        "rms_alpha_rel": float(
            np.sqrt(np.mean(np.abs(alpha_avg - alpha_full) ** 2)) / scale_a
        ),
        "rms_beta_rel": float(
            np.sqrt(np.mean(np.abs(beta_avg - beta_full) ** 2)) / scale_b
        ),
        "rms_abs_alpha_rel": float(
            np.sqrt(np.mean((np.abs(alpha_avg) - np.abs(alpha_full)) ** 2)) / scale_a
        ),
        "n_samples": int(len(ts)),
    }
