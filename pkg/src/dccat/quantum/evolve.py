"""Lindblad propagation with a stiff implicit multistep integrator.

The master equation d rho/dt = -i [H(t), rho] + kappa D[L] rho is integrated
with zvode's backward differentiation formulas (complex-valued, configurable
order <= 5 and tolerances), which copes with the widely separated timescales
of the time-dependent model.  State validity (trace, hermiticity, positivity)
is checked at every stored checkpoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import ode

from ..core import CircuitParams
from .fock import FockOperators
from .hamiltonian import HamiltonianPieces, HamiltonianSpec


class EvolutionError(RuntimeError):
    """Integration failed or produced an invalid density matrix."""


@dataclass(frozen=True)
class SolverConfig:
    method: str = "bdf"
    order: int = 5
    rtol: float = 1e-8
    atol: float = 1e-10
    nsteps: int = 50_000_000
    trace_tol_per_us: float = 1e-6

    def __post_init__(self):
        if self.method not in ("bdf", "adams"):
            raise ValueError("method must be 'bdf' or 'adams'")


@dataclass
class QuantumState:
    """Density matrix checkpoint with its validity diagnostics."""

    rho: np.ndarray
    time: float

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.rho + self.rho.conj().T)
        return float(np.linalg.eigvalsh(h)[0])

    def validate(self, trace_tol: float = 1e-5) -> None:
        if abs(self.trace() - 1.0) > trace_tol:
            raise EvolutionError(
                f"trace drifted to {self.trace():.8f} at t = {self.time:.3e} s"
            )
        if self.hermiticity_defect() > 1e-10:
            raise EvolutionError("hermiticity defect exceeds 1e-10")
        if self.min_eigenvalue() < -1e-8:
            raise EvolutionError("negative eigenvalue below -1e-8")

    def save(self, path, dims) -> None:
        np.savez_compressed(path, rho=self.rho, dims=np.asarray(dims), time=self.time)

    @staticmethod
    def load(path):
        data = np.load(path)
        return QuantumState(rho=data["rho"], time=float(data["time"])), tuple(
            int(d) for d in data["dims"]
        )


def is_density_matrix(rho: np.ndarray, tol: float = 1e-8) -> bool:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if abs(np.trace(rho) - 1.0) > 1e-6:
        return False
    if np.max(np.abs(rho - rho.conj().T)) > 1e-8:
        return False
    return bool(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] > -tol)


def lindblad_rhs_factory(pieces: HamiltonianPieces):
    L, kappa = pieces.collapse()
    Ld = L.conj().T
    LdL = Ld @ L
    dim = L.shape[0]

    def rhs(t, y):
        rho = y.reshape(dim, dim)
        h = pieces(t)
        out = -1j * (h @ rho - rho @ h)
        if kappa > 0.0:
            out += kappa * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
        return out.ravel()

    return rhs


def evolve(
    rho0: np.ndarray,
    spec: HamiltonianSpec,
    ops: FockOperators,
    params: CircuitParams,
    t_eval,
    config: SolverConfig | None = None,
) -> list[QuantumState]:
    """Propagate rho0 through the named model, checkpointing at t_eval.

    Raises EvolutionError on solver failure or when the trace drifts beyond
    the configured bound.
    """
    config = config or SolverConfig()
    if not is_density_matrix(rho0):
        raise ValueError("rho0 is not a valid density matrix")
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval[0] != 0.0:
        raise ValueError("t_eval must start at 0")
    pieces = HamiltonianPieces(spec, ops, params)
    rhs = lindblad_rhs_factory(pieces)
    solver = ode(rhs)
    solver.set_integrator(
        "zvode",
        method=config.method,
        order=config.order,
        rtol=config.rtol,
        atol=config.atol,
        nsteps=config.nsteps,
    )
    solver.set_initial_value(rho0.astype(complex).ravel(), 0.0)
    dim = rho0.shape[0]
    states = [QuantumState(rho0.astype(complex).copy(), 0.0)]
    trace_tol = max(config.trace_tol_per_us * (t_eval[-1] * 1e6 + 1.0), 1e-9)
    for t in t_eval[1:]:
        y = solver.integrate(t)
        if not solver.successful():
            raise EvolutionError(f"zvode failed at t = {t:.3e} s")
        state = QuantumState(y.reshape(dim, dim).copy(), float(t))
        if abs(state.trace() - 1.0) > trace_tol:
            raise EvolutionError(
                f"trace drift {state.trace() - 1.0:.3e} at t = {t:.3e} s "
                f"exceeds {trace_tol:.1e}"
            )
        states.append(state)
    return states
