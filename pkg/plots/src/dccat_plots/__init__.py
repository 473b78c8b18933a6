from .bundle import BundleError, RunBundle
from .figures import (
    plot_fidelity,
    plot_freqscan,
    plot_phase_space,
    plot_tongue,
    plot_wigner,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "BundleError",
    "RunBundle",
    "plot_fidelity",
    "plot_freqscan",
    "plot_phase_space",
    "plot_tongue",
    "plot_wigner",
    "render",
    "__version__",
]
