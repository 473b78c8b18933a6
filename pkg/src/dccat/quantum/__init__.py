from .dephasing import dephasing_channel_check, liouvillian_matrix
from .evolve import EvolutionError, QuantumState, SolverConfig, evolve, is_density_matrix
from .fock import (
    FULL_DIMS,
    REDUCED_DIMS,
    FockOperators,
    cat_state,
    coherent_state,
    density,
    parity_operator,
    ptrace_memory,
    trace_distance,
)
from .hamiltonian import (
    EFFECTIVE_RWA,
    FULL_TIME_DEPENDENT,
    FULL_WITH_FILTER,
    HamiltonianSpec,
    build_hamiltonian,
)
from .measures import cat_fidelity, parity_expectation, wigner

__all__ = [
    "EFFECTIVE_RWA",
    "FULL_DIMS",
    "FULL_TIME_DEPENDENT",
    "FULL_WITH_FILTER",
    "EvolutionError",
    "FockOperators",
    "HamiltonianSpec",
    "QuantumState",
    "REDUCED_DIMS",
    "SolverConfig",
    "build_hamiltonian",
    "cat_fidelity",
    "cat_state",
    "coherent_state",
    "dephasing_channel_check",
    "density",
    "evolve",
    "is_density_matrix",
    "liouvillian_matrix",
    "parity_expectation",
    "parity_operator",
    "ptrace_memory",
    "trace_distance",
    "wigner",
]
