"""Circuit parameters and closed-form derived quantities.

Everything downstream (classical integration, averaged models, Lindblad
simulation) consumes the two containers defined here.  All frequencies and
rates are angular (rad/s); the Josephson energy is carried as E_J/hbar in
rad/s so that every formula stays in frequency units.  Boundary code (CLI,
config files) converts from ordinary Hz exactly once.
"""

from __future__ import annotations

import cmath
import hashlib
import math
from dataclasses import dataclass, field, fields
from typing import NamedTuple

from scipy.constants import e as _E_CHARGE
from scipy.constants import hbar as _HBAR

TWO_PI = 2.0 * math.pi

# nu_0 = E_J R_0 (2e/hbar)^2 with E_J in joules; with E_J kept as rad/s the
# prefactor collapses to 4 e^2 / hbar.
_NU0_PREFACTOR = 4.0 * _E_CHARGE**2 / _HBAR

#: Default tolerance on the frequency-matching condition omega_dc = omega_b - 2 omega_a.
MATCHED_TOL = TWO_PI * 1e3

_BESSEL_TERMS = 20


class ParameterError(ValueError):
    """Raised when a parameter set violates its declared invariants."""


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind J_n(x) by fixed 20-term power series.

    Truncation error is below 1e-12 for |x| <= 2; every use in this package
    has |x| <= 0.5.
    """
    if n < 0:
        raise ValueError("order must be non-negative")
    half = 0.5 * x
    total = 0.0
    for m in range(_BESSEL_TERMS):
        term = (-1.0) ** m * half ** (2 * m + n) / (
            math.factorial(m) * math.factorial(m + n)
        )
        total += term
    return total


@dataclass(frozen=True)
class CircuitParams:
    """Physical parameter set of the circuit, locking branch included.

    Angular frequencies in rad/s, resistance in ohm, capacitance in farad.
    ``E_J`` is the Josephson energy divided by hbar (rad/s).  ``eps_d`` is the
    complex buffer drive amplitude (rad/s); ``eps_L`` the dimensionless
    locking-tone amplitude.  ``delta_omega`` is the static detuning
    omega_dc - omega_L and is filled in automatically when omitted.
    """

    omega_a: float
    omega_b: float
    omega_dc: float
    omega_d: float
    omega_L: float
    phi_zpf_a: float
    phi_zpf_b: float
    E_J: float
    kappa_b: float
    eps_d: complex = 0.0 + 0.0j
    R0: float = 0.0
    C0: float = 0.0
    eps_L: float = 0.0
    delta_omega: float = None  # type: ignore[assignment]
    matched: bool = True
    matched_tol: float = MATCHED_TOL

    def __post_init__(self):
        for name in ("omega_a", "omega_b", "omega_dc", "omega_d", "omega_L"):
            if getattr(self, name) <= 0.0:
                raise ParameterError(f"{name} must be strictly positive")
        for name, lo in (("E_J", 0.0), ("kappa_b", 0.0), ("eps_L", 0.0), ("R0", 0.0)):
            if getattr(self, name) < lo:
                raise ParameterError(f"{name} must be >= {lo}")
        for name in ("phi_zpf_a", "phi_zpf_b"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ParameterError(f"{name} must lie in [0, 1)")
        if self.R0 > 0.0 and self.C0 <= 0.0:
            raise ParameterError("C0 must be > 0 when R0 > 0")
        object.__setattr__(self, "eps_d", complex(self.eps_d))
        implied = self.omega_dc - self.omega_L
        if self.delta_omega is None:
            object.__setattr__(self, "delta_omega", implied)
        elif abs(self.delta_omega - implied) > 1e-9 * max(1.0, abs(implied)):
            raise ParameterError(
                "delta_omega inconsistent with omega_dc - omega_L "
                f"({self.delta_omega} vs {implied})"
            )
        if self.matched and abs(self.matching_residual) > self.matched_tol:
            raise ParameterError(
                "matched flag set but |omega_dc - (omega_b - 2 omega_a)| = "
                f"{abs(self.matching_residual):.3e} rad/s exceeds the tolerance"
            )

    @property
    def omega_p(self) -> float:
        """Frequency-matching value omega_b - 2 omega_a (rad/s)."""
        return self.omega_b - 2.0 * self.omega_a

    @property
    def matching_residual(self) -> float:
        return self.omega_dc - self.omega_p

    @property
    def tau(self) -> float:
        """RC time R0*C0 (s); 0.0 when the locking branch is absent."""
        return self.R0 * self.C0

    def replace(self, **kwargs) -> "CircuitParams":
        """Copy with selected fields replaced; delta_omega is recomputed
        unless explicitly supplied."""
        current = {f.name: getattr(self, f.name) for f in fields(self)}
        current.update(kwargs)
        if "delta_omega" not in kwargs and (
            "omega_dc" in kwargs or "omega_L" in kwargs
        ):
            current["delta_omega"] = None
        return CircuitParams(**current)

    def provenance(self) -> str:
        """Stable identifier of the physical parameter values."""
        vals = tuple(
            (f.name, repr(getattr(self, f.name)))
            for f in fields(self)
            if f.name != "matched_tol"
        )
        return hashlib.md5(repr(vals).encode()).hexdigest()[:16]


def reference_params(**overrides) -> CircuitParams:
    """Baseline parameter set used throughout the numerical studies (locking
    branch off by default): omega_a/2pi = 1.1 GHz, omega_b/2pi = 9.2 GHz,
    phi_a = 0.24, phi_b = 0.29, kappa_b/2pi = 20 MHz, E_J/h = 2.3 GHz,
    pump/DC frequency 7 GHz, drive at omega_b."""
    base = dict(
        omega_a=TWO_PI * 1.1e9,
        omega_b=TWO_PI * 9.2e9,
        omega_dc=TWO_PI * 7.0e9,
        omega_d=TWO_PI * 9.2e9,
        omega_L=TWO_PI * 7.0e9,
        phi_zpf_a=0.24,
        phi_zpf_b=0.29,
        E_J=TWO_PI * 2.3e9,
        kappa_b=TWO_PI * 20e6,
    )
    base.update(overrides)
    return CircuitParams(**base)


@dataclass(frozen=True)
class DerivedParams:
    """Closed-form quantities computed from a CircuitParams (all rad/s or s).

    ``warnings`` collects non-fatal conditions (undefined kappa_2, matching
    violation) attached by :func:`derive`.
    """

    E_J_tilde: float
    g2: complex
    g2_a: complex
    g2_b: complex
    kappa_2: float
    nu_0: float
    tau: float
    alpha_ss: complex
    xi_a1: complex
    xi_a2: complex
    xi_b1: complex
    xi_b2: complex
    xi_bar_a: complex
    xi_bar_b: complex
    delta_A: float
    delta_B1: float
    delta_B2: float
    delta_a: float
    delta_b: float
    delta_a2: float
    delta_b2: float
    kappa_phi: float
    T_d: float
    provenance: str = ""
    warnings: tuple = field(default_factory=tuple)


def derive(
    params: CircuitParams, noise_sigma: float = 0.0, noise_dt: float = 1e-11
) -> DerivedParams:
    """Populate every closed-form derived quantity.

    ``noise_sigma`` (rad/s) and ``noise_dt`` (s) parameterize the
    piecewise-constant voltage-noise model and enter only kappa_phi and T_d.
    Pure and deterministic: identical inputs give bit-identical outputs.
    """
    p = params
    notes = []
    pa, pb = p.phi_zpf_a, p.phi_zpf_b
    ej_t = p.E_J * math.exp(-0.5 * (pa * pa + pb * pb))
    g2 = ej_t * pa * pa * pb / 4j
    g2_a = -(pa * pa / 3.0) * g2
    g2_b = -(pb * pb / 2.0) * g2
    if p.kappa_b > 0.0:
        kappa_2 = 4.0 * abs(g2) ** 2 / p.kappa_b
    else:
        kappa_2 = math.nan
        notes.append("kappa_2 undefined: kappa_b = 0")
    nu_0 = p.E_J * p.R0 * _NU0_PREFACTOR
    if g2 != 0:
        alpha_ss = cmath.sqrt(-p.eps_d / g2.conjugate())
    else:
        alpha_ss = complex(math.nan) if p.eps_d != 0 else 0.0 + 0.0j
        if p.eps_d != 0:
            notes.append("alpha_ss undefined: g2 = 0 with nonzero drive")

    # Displacements absorbing the linear drive terms at +/- omega_dc.
    xi_a1 = -(pa * ej_t / 2.0) / (1j * (p.omega_a - p.omega_dc))
    xi_a2 = +(pa * ej_t / 2.0) / (1j * (p.omega_a + p.omega_dc))
    xi_b1 = -(pb * ej_t / 2.0) / (1j * (p.omega_b - p.omega_dc))
    xi_b2 = +(pb * ej_t / 2.0) / (1j * (p.omega_b + p.omega_dc))
    xi_bar_a = xi_a1 + xi_a2.conjugate()
    xi_bar_b = xi_b1 + xi_b2.conjugate()

    delta_A = p.E_J * pa * pa * p.eps_L / 2.0
    delta_B1 = p.E_J * pb * pb * p.eps_L / 2.0
    delta_B2 = (p.kappa_b / 2.0) * (p.kappa_b / (4.0 * p.omega_b))

    # First-order frequency renormalizations driven by the xi displacements.
    common = pa * xi_bar_a.imag + pb * xi_bar_b.imag
    delta_a = ej_t * pa * pa * common
    delta_b = ej_t * pb * pb * common

    # Second-order RWA renormalizations.
    wa, wb = p.omega_a, p.omega_b
    pref = (ej_t / 2.0) ** 2
    delta_a2 = pref * pa**2 * (
        pa**2 / (wb - 4.0 * wa)
        - pa**2 / wb
        - pb**2 / (2.0 * wb - wa)
        - pb**2 / (2.0 * wb - 3.0 * wa)
        - 4.0 * pb**2 / (3.0 * wa)
    )
    delta_b2 = pref * pb**2 * (
        -(pb**2) / (wb + 2.0 * wa)
        - pb**2 / (3.0 * wb - 2.0 * wa)
        - pa**2 / (2.0 * wb - wa)
        + pa**2 / (2.0 * wb - 3.0 * wa)
        + 2.0 * pa**2 / (3.0 * wa)
    )

    kappa_phi = noise_dt * noise_sigma**2 / 4.0
    if noise_sigma > 0.0 and noise_dt > 0.0:
        # sqrt(sigma^2) dt sqrt(T_d/dt) = pi/2
        T_d = (math.pi / 2.0) ** 2 / (noise_sigma**2 * noise_dt)
    else:
        T_d = math.inf

    if abs(p.matching_residual) > p.matched_tol:
        notes.append(
            "matching condition violated: omega_dc - (omega_b - 2 omega_a) = "
            f"{p.matching_residual:.6e} rad/s"
        )

    return DerivedParams(
        E_J_tilde=ej_t,
        g2=g2,
        g2_a=g2_a,
        g2_b=g2_b,
        kappa_2=kappa_2,
        nu_0=nu_0,
        tau=p.tau,
        alpha_ss=alpha_ss,
        xi_a1=xi_a1,
        xi_a2=xi_a2,
        xi_b1=xi_b1,
        xi_b2=xi_b2,
        xi_bar_a=xi_bar_a,
        xi_bar_b=xi_bar_b,
        delta_A=delta_A,
        delta_B1=delta_B1,
        delta_B2=delta_B2,
        delta_a=delta_a,
        delta_b=delta_b,
        delta_a2=delta_a2,
        delta_b2=delta_b2,
        kappa_phi=kappa_phi,
        T_d=T_d,
        provenance=p.provenance(),
        warnings=tuple(notes),
    )


class PumpTerm(NamedTuple):
    harmonic: int  # multiple of the pump frequency
    amplitude: float  # in units of E_J
    parity: str  # "cos" or "sin" of the circuit phase


def pump_expansion_coefficients(eps_p: float, n_max: int) -> list[PumpTerm]:
    """Harmonic content of the pumped junction potential, in units of E_J.

    Expanding -cos(eps_p cos(w_p t) + phi) with the Jacobi-Anger identity
    gives a stationary -J0(eps_p) cos(phi) term plus 2 J_k(eps_p) sidebands at
    the k-th pump harmonic, alternating between sin(phi) and cos(phi).
    """
    if eps_p < 0.0:
        raise ValueError("eps_p must be >= 0")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    terms = [PumpTerm(0, -bessel_j(0, eps_p), "cos")]
    for k in range(1, n_max + 1):
        sign = 1.0 if k % 4 in (1, 2) else -1.0
        parity = "sin" if k % 2 else "cos"
        terms.append(PumpTerm(k, sign * 2.0 * bessel_j(k, eps_p), parity))
    return terms


@dataclass(frozen=True)
class LockedCoefficients:
    """Coupling and detuning set corrected for a residual junction-phase
    oscillation c_J cos(omega_dc t) on top of the locked winding."""

    c_J: float
    g2: complex
    g2_a: complex
    g2_b: complex
    delta_a: float
    delta_b: float
    delta_a2: float
    delta_b2: float


def locked_junction_coefficients(dp: DerivedParams, c_J: float) -> LockedCoefficients:
    """Bessel-corrected couplings for a locked junction.

    First-order couplings and detunings pick up a factor J0(c_J) + J1(c_J);
    the second-order frequency renormalizations a factor
    J0(c_J) (J0(c_J) - 2 J1(c_J)).
    """
    if abs(c_J) >= 1.0:
        raise ValueError("c_J must satisfy |c_J| < 1")
    j0 = bessel_j(0, c_J)
    j1 = bessel_j(1, c_J)
    first = j0 + j1
    second = j0 * (j0 - 2.0 * j1)
    return LockedCoefficients(
        c_J=c_J,
        g2=first * dp.g2,
        g2_a=first * dp.g2_a,
        g2_b=first * dp.g2_b,
        delta_a=first * dp.delta_a,
        delta_b=first * dp.delta_b,
        delta_a2=second * dp.delta_a2,
        delta_b2=second * dp.delta_b2,
    )
