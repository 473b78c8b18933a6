import numpy as np
import pytest

from dccat import derive, reference_params
from dccat.core import TWO_PI


@pytest.fixture(scope="session")
def baseline():
    return reference_params()


@pytest.fixture(scope="session")
def baseline_derived(baseline):
    return derive(baseline, noise_sigma=TWO_PI * 0.1e9, noise_dt=1e-11)


@pytest.fixture(scope="session")
def locking_params():
    """Baseline circuit plus the locking branch of the noise study:
    R0 = 100 ohm, C0 = 15.9 pF, eps_L = 0.1."""
    return reference_params(R0=100.0, C0=15.9e-12, eps_L=0.1)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240901)
