"""Arnold-tongue maps: lock classification over a (delta_omega, eps_L) grid.

Tongue mapping follows the deterministic protocol: a fixed detuning between
the DC bias and the locking tone (constant-offset noise channel), one full
classical integration per grid cell, and a verdict from the secular slope of
psi over the final window.  Cells are embarrassingly parallel; the verdict
matrix is identical however the cells are scheduled.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classical import ClassicalState, DivergenceError, IntegratorConfig, integrate
from .core import TWO_PI, CircuitParams, derive
from .noise import NoiseModel

#: Default lock verdict: |psi_dot| < 2pi x 0.5 MHz over the final 0.1 us.
DEFAULT_THRESHOLD = TWO_PI * 0.5e6
DEFAULT_WINDOW = 0.1e-6
DEFAULT_T_F = 0.4e-6

GRID_SCHEMA_VERSION = 1


def classify_lock(traj, t_f: float, window: float = DEFAULT_WINDOW,
                  threshold: float = DEFAULT_THRESHOLD) -> dict:
    """Lock verdict from the secular slope of psi over [t_f - window, t_f].

    psi_dot is the linear-regression slope; locked means |psi_dot| below the
    threshold.
    """
    if window > t_f / 4.0 * (1.0 + 1e-12):
        raise ValueError("window must not exceed t_f / 4")
    t = traj.times
    if t[-1] < t_f * (1.0 - 1e-9):
        raise ValueError("trajectory does not span [0, t_f]")
    mask = (t >= t_f - window) & (t <= t_f)
    if mask.sum() < 8:
        raise ValueError("insufficient samples in the classification window")
    slope = float(np.polyfit(t[mask], traj.psi()[mask], 1)[0])
    return {"locked": bool(abs(slope) < threshold), "psi_dot": slope}


@dataclass
class ArnoldGrid:
    """Verdict map over the (delta_omega, eps_L) plane at fixed drive.

    ``psi_dot`` and ``locked`` have shape (len(eps_L), len(delta_omega));
    ``diverged`` marks cells whose integration hit the amplitude guard.
    ``boundaries`` holds the predicted bare and photon-number-corrected lock
    boundaries, as explicit per-row positions.
    """

    delta_omega: np.ndarray
    eps_L: np.ndarray
    eps_d: complex
    psi_dot: np.ndarray
    locked: np.ndarray
    diverged: np.ndarray
    boundaries: dict
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.psi_dot.shape != (len(self.eps_L), len(self.delta_omega)):
            raise ValueError("verdict matrix shape must match the axes")
        for ax in (self.delta_omega, self.eps_L):
            if len(ax) > 1 and not np.all(np.diff(ax) > 0.0):
                raise ValueError("axes must be strictly increasing")

    def cell_size(self) -> float:
        return float(np.diff(self.delta_omega).mean()) if len(self.delta_omega) > 1 else 0.0

    def empirical_half_widths(self):
        """Per-row extent of the locked region around delta_omega = 0:
        (positive-side edge, negative-side edge); NaN when nothing locks."""
        pos = np.full(len(self.eps_L), np.nan)
        neg = np.full(len(self.eps_L), np.nan)
        for i in range(len(self.eps_L)):
            locked = self.locked[i] & ~self.diverged[i]
            if locked.any():
                pos[i] = self.delta_omega[locked].max()
                neg[i] = self.delta_omega[locked].min()
        return pos, neg

    def asymmetry(self):
        """Per-row left/right boundary imbalance pos_edge + neg_edge (rad/s);
        zero for a symmetric tongue."""
        pos, neg = self.empirical_half_widths()
        return pos + neg

    def to_csv(self, path) -> None:
        """Long form: delta_omega, eps_L, psi_dot, locked, diverged."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("delta_omega,eps_L,psi_dot,locked,diverged\n")
            for i, eps in enumerate(self.eps_L):
                for j, dw in enumerate(self.delta_omega):
                    fh.write(
                        f"{float(dw)!r},{float(eps)!r},{float(self.psi_dot[i, j])!r},"
                        f"{int(self.locked[i, j])},{int(self.diverged[i, j])}\n"
                    )

    def metadata(self) -> dict:
        return {
            "schema_version": GRID_SCHEMA_VERSION,
            "eps_d": [self.eps_d.real, self.eps_d.imag],
            "boundaries": self.boundaries,
            **self.meta,
        }

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.metadata(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def predicted_boundaries(params: CircuitParams, eps_L_axis, eps_d: complex) -> dict:
    """Bare and photon-number-corrected lock boundaries per eps_L row.

    Bare: |delta_omega| = eps_L nu_0 / 2.  Corrected: the same scaled by
    |1 - (phi_zpf_a |alpha|)^2| with |alpha|^2 = |eps_d / g2|.
    """
    dp = derive(params.replace(eps_d=eps_d))
    eps_L_axis = np.asarray(eps_L_axis, dtype=float)
    bare = 0.5 * eps_L_axis * dp.nu_0
    nbar = abs(eps_d / dp.g2) if dp.g2 != 0 else 0.0
    factor = abs(1.0 - params.phi_zpf_a**2 * nbar)
    corrected = bare * factor
    return {
        "eps_L": eps_L_axis.tolist(),
        "bare_half_width": bare.tolist(),
        "corrected_half_width": corrected.tolist(),
        "correction_factor": factor,
        "nbar": nbar,
        "nu_0": dp.nu_0,
    }


def _cell_initial_state(params: CircuitParams, eps_d: complex) -> ClassicalState:
    # seed at the expected locked attractor: phi_J_hat = pi shifts the cat
    # angle to pi/4 + pi/2 (+ drive phase/2)
    dp = derive(params.replace(eps_d=eps_d))
    if eps_d != 0 and dp.g2 != 0:
        mag = math.sqrt(abs(eps_d / dp.g2))
        import cmath

        ang = math.pi / 4.0 + cmath.phase(eps_d) / 2.0 + math.pi / 2.0
        alpha0 = mag * complex(math.cos(ang), math.sin(ang))
    else:
        alpha0 = 0.0j
    return ClassicalState(alpha=alpha0, phi_J_hat=math.pi)


def _tongue_cell(args):
    (i, j, params, eps_d, delta, t_f, window, threshold, config) = args
    p = params.replace(eps_L=float(params.eps_L), eps_d=eps_d)
    noise = NoiseModel("constant_offset", offset=float(delta))
    try:
        traj = integrate(_cell_initial_state(p, eps_d), t_f, p, noise, config)
    except DivergenceError:
        return i, j, math.nan, False, True
    verdict = classify_lock(traj, t_f, window, threshold)
    return i, j, verdict["psi_dot"], verdict["locked"], False


def sweep_tongue(
    params: CircuitParams,
    delta_axis,
    eps_L_axis,
    eps_d: complex = 0.0j,
    t_f: float = DEFAULT_T_F,
    window: float = DEFAULT_WINDOW,
    threshold: float = DEFAULT_THRESHOLD,
    config: IntegratorConfig | None = None,
    processes: int | None = None,
) -> ArnoldGrid:
    """Map the locked region: one deterministic integration per cell.

    The detuning is applied through the constant-offset noise channel (no
    stochastic noise is used for tongue mapping), so the sweep needs no seed.
    Diverged cells are flagged, never silently reported unlocked.
    """
    delta_axis = np.asarray(delta_axis, dtype=float)
    eps_L_axis = np.asarray(eps_L_axis, dtype=float)
    config = config or IntegratorConfig(out_dt=2e-10)
    t0 = time.time()
    jobs = []
    for i, eps_L in enumerate(eps_L_axis):
        p_row = params.replace(eps_L=float(eps_L))
        for j, delta in enumerate(delta_axis):
            jobs.append((i, j, p_row, complex(eps_d), float(delta), t_f, window, threshold, config))
    if processes is None:
        processes = os.cpu_count() or 1
    if processes > 1 and len(jobs) > 8:
        with ProcessPoolExecutor(max_workers=processes) as pool:
            results = list(pool.map(_tongue_cell, jobs, chunksize=8))
    else:
        results = [_tongue_cell(job) for job in jobs]

    shape = (len(eps_L_axis), len(delta_axis))
    psi_dot = np.full(shape, np.nan)
    locked = np.zeros(shape, dtype=bool)
    diverged = np.zeros(shape, dtype=bool)
    for i, j, slope, is_locked, is_div in results:
        psi_dot[i, j] = slope
        locked[i, j] = is_locked
        diverged[i, j] = is_div

    return ArnoldGrid(
        delta_omega=delta_axis,
        eps_L=eps_L_axis,
        eps_d=complex(eps_d),
        psi_dot=psi_dot,
        locked=locked,
        diverged=diverged,
        boundaries=predicted_boundaries(params, eps_L_axis, complex(eps_d)),
        meta={
            "t_f": t_f,
            "window": window,
            "threshold": threshold,
            "dt": config.dt,
            "runtime_s": time.time() - t0,
            "provenance": params.provenance(),
            "params": {
                "omega_a": params.omega_a,
                "omega_b": params.omega_b,
                "omega_dc": params.omega_dc,
                "omega_L": params.omega_L,
                "phi_zpf_a": params.phi_zpf_a,
                "phi_zpf_b": params.phi_zpf_b,
                "E_J": params.E_J,
                "kappa_b": params.kappa_b,
                "R0": params.R0,
                "C0": params.C0,
            },
        },
    )


def default_axes():
    """41 x 41 grid over delta_omega/2pi in [-20, 20] MHz, eps_L in [0, 0.2]."""
    return TWO_PI * np.linspace(-20e6, 20e6, 41), np.linspace(0.0, 0.2, 41)


def boundary_match_fraction(grid: ArnoldGrid, which: str = "bare") -> float:
    """Fraction of rows whose empirical lock edges sit within one grid cell
    of the predicted boundary (rows whose prediction falls inside the axis)."""
    pred = np.asarray(grid.boundaries[f"{which}_half_width"])
    pos, neg = grid.empirical_half_widths()
    cell = grid.cell_size()
    dw_max = grid.delta_omega.max()
    total, hits = 0, 0
    for i in range(len(grid.eps_L)):
        if not (cell < pred[i] < dw_max - cell):
            continue
        for edge, sign in ((pos[i], 1.0), (neg[i], -1.0)):
            total += 1
            if math.isfinite(edge) and abs(edge - sign * pred[i]) <= cell * (1.0 + 1e-9):
                hits += 1
    if total == 0:
        raise ValueError("no predicted boundary points fall inside the grid")
    return hits / total
