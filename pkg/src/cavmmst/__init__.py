"""Quasiclassical and exact quantum dynamics of two-level emitters in a
multimode 1D cavity: trajectory ensembles with zero-point sampling, a CIS
reference propagator, and the analysis tools to extract rates and delay
statistics from them."""

from .kernels import backend_name
from .model import (ConfigurationError, ModeBasis, SystemConfig,
                    build_mode_basis, coupling_constant, coupling_matrix,
                    fgr_rate, polarization_profile)
from .sampling import SamplingOptions

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "ModeBasis",
    "SystemConfig",
    "SamplingOptions",
    "backend_name",
    "build_mode_basis",
    "coupling_constant",
    "coupling_matrix",
    "fgr_rate",
    "polarization_profile",
    "__version__",
]
