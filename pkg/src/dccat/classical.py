"""Full time-dependent classical equations of motion.

The state gathers the two oscillator quadrature pairs (scaled by their
zero-point fluctuations), the RC locking variable n_R and the junction phase
in the locking-tone frame, phi_J_hat = phi_J - omega_L t:

    d phi_a / dt = omega_a n_a
    d n_a  / dt  = -omega_a phi_a + 2 E_J phi_zpf_a sin(phi_J_hat + omega_L t)
    d phi_b / dt = omega_b n_b
    d n_b  / dt  = -omega_b phi_b + 2 E_J phi_zpf_b sin(phi_J_hat + omega_L t)
                   - kappa_b n_b - 4 Re(eps_d e^{-i omega_d t})
    d n_R  / dt  = -n_R/tau + nu_0 sin(phi_J_hat + omega_L t)
    d phi_J_hat / dt = delta_omega + delta_omega_N(t)
                   - phi_zpf_a omega_a n_a - phi_zpf_b omega_b n_b
                   - n_R/tau + eps_L omega_L cos(omega_L t)

With R0 = 0 the n_R line and its feedback are dropped and phi_J_hat simply
integrates the remaining voltage balance.  The buffer damping acts on the
n_b quadrature only; the familiar amplitude damping emerges after averaging.
Integration is fixed-step RK4 with the noise value frozen across the four
stages of a step and across each hold interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import CircuitParams, derive
from .noise import KIND_WHITE_HOLD, NoiseModel, NoisePath, sample_path

#: Default step: resolves omega_b/2pi = 9.2 GHz with ~217 points per period.
DEFAULT_DT = 0.5e-12

#: Amplitude beyond which a run is declared divergent.
DEFAULT_GUARD = 1e3

_STATUS_OK = 0
_STATUS_DIVERGED = 1
_STATUS_NAN = 2


class DivergenceError(RuntimeError):
    """Integration aborted: amplitude guard breached or NaN encountered."""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class ClassicalState:
    """Instantaneous classical state.

    alpha = (phi_a + i n_a)/2 and beta = (phi_b + i n_b)/2 are the complex
    mode amplitudes; n_R = tau (2e/hbar) V_R the RC variable; phi_J_hat the
    junction phase in the locking-tone frame.
    """

    alpha: complex = 0.0 + 0.0j
    beta: complex = 0.0 + 0.0j
    n_R: float = 0.0
    phi_J_hat: float = 0.0

    def __post_init__(self):
        vals = (
            self.alpha.real,
            self.alpha.imag,
            self.beta.real,
            self.beta.imag,
            self.n_R,
            self.phi_J_hat,
        )
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("classical state must be finite")

    def to_vector(self) -> np.ndarray:
        return np.array(
            [
                2.0 * self.alpha.real,
                2.0 * self.alpha.imag,
                2.0 * self.beta.real,
                2.0 * self.beta.imag,
                self.n_R,
                self.phi_J_hat,
            ]
        )

    @staticmethod
    def from_vector(y) -> "ClassicalState":
        return ClassicalState(
            alpha=0.5 * (y[0] + 1j * y[1]),
            beta=0.5 * (y[2] + 1j * y[3]),
            n_R=y[4],
            phi_J_hat=y[5],
        )


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings.  out_dt is the output sampling interval;
    ramp_time > 0 switches the buffer drive on linearly over that interval."""

    dt: float = DEFAULT_DT
    out_dt: float = 1e-10
    guard: float = DEFAULT_GUARD
    ramp_time: float = 0.0

    def __post_init__(self):
        if self.dt <= 0.0 or self.out_dt <= 0.0:
            raise ValueError("dt and out_dt must be > 0")
        if self.ramp_time < 0.0:
            raise ValueError("ramp_time must be >= 0")

    def out_every(self) -> int:
        return max(1, round(self.out_dt / self.dt))


def _params_vector(params: CircuitParams, ramp_time: float = 0.0) -> np.ndarray:
    dp = derive(params)
    has_rc = 1.0 if params.R0 > 0.0 else 0.0
    inv_tau = 1.0 / params.tau if has_rc else 0.0
    return np.array(
        [
            params.omega_a,
            params.omega_b,
            params.kappa_b,
            params.E_J,
            params.phi_zpf_a,
            params.phi_zpf_b,
            params.eps_d.real,
            params.eps_d.imag,
            params.omega_d,
            params.omega_L,
            params.delta_omega,
            params.eps_L,
            dp.nu_0,
            inv_tau,
            has_rc,
            ramp_time,
        ]
    )


@njit(cache=True)
def _rhs_vec(y, t, dw, p, dy):
    omega_a, omega_b, kappa_b = p[0], p[1], p[2]
    ej, pa, pb = p[3], p[4], p[5]
    eps_dr, eps_di, omega_d = p[6], p[7], p[8]
    omega_L, delta_omega, eps_L = p[9], p[10], p[11]
    nu0, inv_tau, has_rc = p[12], p[13], p[14]
    ramp_time = p[15]

    s = math.sin(y[5] + omega_L * t)
    drive = eps_dr * math.cos(omega_d * t) + eps_di * math.sin(omega_d * t)
    if ramp_time > 0.0 and t < ramp_time:
        drive *= t / ramp_time
    dy[0] = omega_a * y[1]
    dy[1] = -omega_a * y[0] + 2.0 * ej * pa * s
    dy[2] = omega_b * y[3]
    dy[3] = -omega_b * y[2] + 2.0 * ej * pb * s - kappa_b * y[3] - 4.0 * drive
    if has_rc > 0.0:
        dy[4] = -y[4] * inv_tau + nu0 * s
        rc = y[4] * inv_tau
    else:
        dy[4] = 0.0
        rc = 0.0
    dy[5] = (
        delta_omega
        + dw
        - pa * omega_a * y[1]
        - pb * omega_b * y[3]
        - rc
        + eps_L * omega_L * math.cos(omega_L * t)
    )


@njit(cache=True)
def _rk4_kernel(y0, t0, dt, n_steps, out_every, p, noise_vals, hold_dt, guard):
    n_out = n_steps // out_every + 1
    out = np.empty((n_out, 6))
    out[0] = y0
    y = y0.copy()
    k1 = np.empty(6)
    k2 = np.empty(6)
    k3 = np.empty(6)
    k4 = np.empty(6)
    ytmp = np.empty(6)
    n_noise = noise_vals.shape[0]
    row = 1
    status = _STATUS_OK
    bad_t = 0.0
    for i in range(n_steps):
        t = t0 + i * dt
        j = int(t / hold_dt)
        if j >= n_noise:
            j = n_noise - 1
        dw = noise_vals[j]

        _rhs_vec(y, t, dw, p, k1)
        for m in range(6):
            ytmp[m] = y[m] + 0.5 * dt * k1[m]
        _rhs_vec(ytmp, t + 0.5 * dt, dw, p, k2)
        for m in range(6):
            ytmp[m] = y[m] + 0.5 * dt * k2[m]
        _rhs_vec(ytmp, t + 0.5 * dt, dw, p, k3)
        for m in range(6):
            ytmp[m] = y[m] + dt * k3[m]
        _rhs_vec(ytmp, t + dt, dw, p, k4)
        for m in range(6):
            y[m] = y[m] + (dt / 6.0) * (k1[m] + 2.0 * (k2[m] + k3[m]) + k4[m])

        if (i + 1) % out_every == 0:
            ok = True
            for m in range(6):
                if not math.isfinite(y[m]):
                    status = _STATUS_NAN
                    ok = False
                    break
            if ok:
                amp_a = math.hypot(y[0], y[1])
                amp_b = math.hypot(y[2], y[3])
                if amp_a > 2.0 * guard or amp_b > 2.0 * guard:
                    status = _STATUS_DIVERGED
                    ok = False
            if not ok:
                bad_t = t + dt
                out = out[:row]
                break
            out[row] = y
            row += 1
    return out, status, bad_t


class Trajectory:
    """Immutable integration output with frame-transformed views.

    Columns of ``data``: phi_a, n_a, phi_b, n_b, n_R, phi_J_hat (the two
    quadrature pairs scaled by their zero-point fluctuations).
    """

    def __init__(self, times: np.ndarray, data: np.ndarray, params: CircuitParams):
        if len(times) != len(data):
            raise ValueError("times/data length mismatch")
        if len(times) > 1 and not np.all(np.diff(times) > 0.0):
            raise ValueError("times must be strictly increasing")
        self.times = np.asarray(times, dtype=float)
        self.data = np.asarray(data, dtype=float)
        self.params = params
        self.times.setflags(write=False)
        self.data.setflags(write=False)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def alpha(self) -> np.ndarray:
        return 0.5 * (self.data[:, 0] + 1j * self.data[:, 1])

    @property
    def beta(self) -> np.ndarray:
        return 0.5 * (self.data[:, 2] + 1j * self.data[:, 3])

    @property
    def n_R(self) -> np.ndarray:
        return self.data[:, 4]

    @property
    def phi_J_hat(self) -> np.ndarray:
        return self.data[:, 5]

    def psi(self) -> np.ndarray:
        """psi(t) = phi_J - (omega_b - 2 omega_a) t."""
        return self.phi_J_hat + (self.params.omega_L - self.params.omega_p) * self.times

    def theta_a(self) -> np.ndarray:
        """Memory-mode angle in the omega_a rotating frame."""
        return np.angle(self.alpha * np.exp(1j * self.params.omega_a * self.times))

    def alpha_rot(self) -> np.ndarray:
        return self.alpha * np.exp(1j * self.params.omega_a * self.times)

    def beta_rot(self) -> np.ndarray:
        return self.beta * np.exp(1j * self.params.omega_b * self.times)

    def state_at(self, index: int) -> ClassicalState:
        return ClassicalState.from_vector(self.data[index])

    def window(self, t_start: float, t_stop: float = math.inf) -> "Trajectory":
        mask = (self.times >= t_start) & (self.times <= t_stop)
        return Trajectory(self.times[mask], self.data[mask], self.params)

    def to_csv(self, path) -> None:
        """Write t, Re alpha, Im alpha, Re beta, Im beta, n_R, phi_J_hat,
        psi, theta_a."""
        al, be = self.alpha, self.beta
        psi, th = self.psi(), self.theta_a()
        cols = [
            self.times,
            al.real,
            al.imag,
            be.real,
            be.imag,
            self.n_R,
            self.phi_J_hat,
            psi,
            th,
        ]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,re_alpha,im_alpha,re_beta,im_beta,n_R,phi_J_hat,psi,theta_a\n")
            for i in range(len(self.times)):
                fh.write(",".join(repr(float(c[i])) for c in cols) + "\n")

    def to_npz(self, path) -> None:
        np.savez_compressed(path, times=self.times, data=self.data)


def _noise_value_at(noise, t: float) -> float:
    if noise is None:
        return 0.0
    if isinstance(noise, NoisePath):
        return float(noise.delta_omega(t))
    if isinstance(noise, NoiseModel):
        if noise.is_stochastic:
            raise ValueError("stochastic noise requires a realized NoisePath")
        return noise.offset if noise.kind == "constant_offset" else 0.0
    return float(noise)


def rhs_full(state: ClassicalState, t: float, params: CircuitParams, noise=None):
    """Time derivative of the full classical state (pure function).

    ``noise`` may be a NoisePath, a non-stochastic NoiseModel, a plain number
    standing for delta_omega_N(t), or None.
    """
    y = state.to_vector()
    dy = np.empty(6)
    _rhs_vec(y, t, _noise_value_at(noise, t), _params_vector(params), dy)
    return ClassicalState(
        alpha=0.5 * (dy[0] + 1j * dy[1]),
        beta=0.5 * (dy[2] + 1j * dy[3]),
        n_R=dy[4],
        phi_J_hat=dy[5],
    )


def integrate(
    initial: ClassicalState,
    t_span,
    params: CircuitParams,
    noise: NoiseModel | None = None,
    config: IntegratorConfig | None = None,
) -> Trajectory:
    """Fixed-step RK4 integration; deterministic for fixed seed and config.

    Raises DivergenceError (with the offending time) if an amplitude exceeds
    the guard or a NaN appears.
    """
    config = config or IntegratorConfig()
    if np.isscalar(t_span):
        t0, t1 = 0.0, float(t_span)
    else:
        t0, t1 = float(t_span[0]), float(t_span[1])
    if t1 <= t0:
        raise ValueError("t_span must have positive extent")
    dt_max = (2.0 * math.pi / params.omega_b) / 20.0
    if config.dt > dt_max:
        raise ValueError(
            f"dt = {config.dt:.3e} s does not resolve omega_b; need <= {dt_max:.3e} s"
        )
    noise = noise or NoiseModel()
    if noise.kind == KIND_WHITE_HOLD and noise.sigma > 0.0:
        path = sample_path(noise, t1 - t0)
        noise_vals = path.values
    elif noise.kind == "constant_offset":
        noise_vals = np.array([noise.offset])
    else:
        noise_vals = np.array([0.0])

    out_every = config.out_every()
    n_steps = int(round((t1 - t0) / config.dt))
    data, status, bad_t = _rk4_kernel(
        initial.to_vector(),
        t0,
        config.dt,
        n_steps,
        out_every,
        _params_vector(params, config.ramp_time),
        noise_vals,
        noise.hold_dt,
        config.guard,
    )
    if status == _STATUS_DIVERGED:
        raise DivergenceError(
            f"amplitude guard ({config.guard:g}) breached at t = {bad_t:.6e} s", bad_t
        )
    if status == _STATUS_NAN:
        raise DivergenceError(f"NaN encountered at t = {bad_t:.6e} s", bad_t)
    times = t0 + config.dt * out_every * np.arange(len(data))
    return Trajectory(times, data, params)


def fixed_point_views(traj: Trajectory, params: CircuitParams | None = None) -> dict:
    """Frame-transformed series: theta_a, psi, rotating-frame amplitudes and
    the steady-state correlation quantity 2 theta_a - psi (wrapped to
    (-pi, pi])."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    psi = traj.psi()
    theta = traj.theta_a()
    corr = np.mod(2.0 * theta - psi + math.pi, 2.0 * math.pi) - math.pi
    return {
        "theta_a": theta,
        "psi": psi,
        "alpha_rot": traj.alpha_rot(),
        "beta_rot": traj.beta_rot(),
        "two_theta_minus_psi": corr,
    }


def _boxcar_valid(x: np.ndarray, t: np.ndarray, width_s: float):
    dt = t[1] - t[0]
    w = max(1, int(round(width_s / dt)))
    kern = np.ones(w) / w
    xs = np.convolve(x, kern, mode="valid")
    ts = t[(w - 1) // 2 : (w - 1) // 2 + len(xs)]
    return xs, ts


def relaxation_rate(
    traj: Trajectory,
    smooth: float = 2e-9,
    beat: float = 12e-9,
    tail: float = 60e-9,
) -> dict:
    """Exponential relaxation rate of alpha toward its steady value.

    The rotating-frame amplitude is boxcar-smoothed (``smooth``) to remove
    fast ripple, the squared deviation from the tail-averaged steady value is
    envelope-averaged over ``beat`` to remove the two-eigenmode interference,
    and ln(envelope) is fit on the stretch between 35% of |alpha_ss| and
    8x the residual ripple floor.  Returns the rate, fit window and floor.
    """
    ar, t = traj.alpha_rot(), traj.times
    sm, t1 = _boxcar_valid(ar, t, smooth)
    tail_mask = t1 > t1[-1] - tail
    if tail_mask.sum() < 4:
        raise ValueError("trajectory too short for a steady-state tail")
    a_end = sm[tail_mask].mean()
    dev2 = np.abs(sm - a_end) ** 2
    env2, t2 = _boxcar_valid(dev2, t1, beat)
    env = np.sqrt(np.maximum(env2, 0.0))
    floor = math.sqrt(float(np.mean(dev2[tail_mask])))
    ipk = int(np.argmax(env))
    hi = 0.35 * abs(a_end)
    lo = 8.0 * floor
    start = ipk
    while start < len(env) and env[start] > hi:
        start += 1
    stop = start
    while stop < len(env) and env[stop] > lo and t2[stop] < t2[-1] - tail:
        stop += 1
    if stop - start < 10:
        raise ValueError("transient window too short for a rate fit")
    coef = np.polyfit(t2[start:stop], np.log(env[start:stop]), 1)
    return {
        "rate": float(-coef[0]),
        "window": (float(t2[start]), float(t2[stop - 1])),
        "floor": floor,
        "alpha_end": complex(a_end),
    }


def estimate_cJ(
    traj: Trajectory, params: CircuitParams, window: float | None = None
) -> float:
    """Amplitude of the residual junction-phase oscillation at omega_dc.

    Least-squares fit of phi_J(t) - omega_dc t over the final ``window``
    seconds to c0 + c1 t + A cos(omega_dc t) + B sin(omega_dc t); returns
    hypot(A, B).  The linear term absorbs any residual detuning drift.
    """
    w = params.omega_dc
    t = traj.times
    if window is None:
        window = min(t[-1] - t[0], 200.0 * 2.0 * math.pi / w)
    mask = t >= t[-1] - window
    ts = t[mask]
    if len(ts) < 8:
        raise ValueError("window contains too few samples")
    if (ts[-1] - ts[0]) * w < 10.0 * 2.0 * math.pi:
        raise ValueError("window shorter than 10 periods of omega_dc")
    if (ts[1] - ts[0]) > math.pi / w:
        raise ValueError("sampling interval does not resolve omega_dc (Nyquist)")
    resid = traj.phi_J_hat[mask] - params.delta_omega * ts
    design = np.column_stack(
        [np.ones_like(ts), ts - ts[0], np.cos(w * ts), np.sin(w * ts)]
    )
    coef, *_ = np.linalg.lstsq(design, resid, rcond=None)
    return float(math.hypot(coef[2], coef[3]))
