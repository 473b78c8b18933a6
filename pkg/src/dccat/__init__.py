"""dccat: classical and quantum dynamics of a DC-voltage-biased Josephson
junction stabilizing a cat qubit, with injection locking against voltage
noise."""

from .core import (
    CircuitParams,
    DerivedParams,
    LockedCoefficients,
    ParameterError,
    bessel_j,
    derive,
    locked_junction_coefficients,
    pump_expansion_coefficients,
    reference_params,
)
from .noise import NoiseModel, NoisePath, predicted_locked_std, sample_path

__version__ = "0.1.0"

__all__ = [
    "CircuitParams",
    "DerivedParams",
    "LockedCoefficients",
    "NoiseModel",
    "NoisePath",
    "ParameterError",
    "bessel_j",
    "derive",
    "locked_junction_coefficients",
    "predicted_locked_std",
    "pump_expansion_coefficients",
    "sample_path",
    "reference_params",
    "__version__",
]
