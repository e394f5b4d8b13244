"""Beurling generalized number systems.

Construct discrete or continuous generalized prime systems, derive the
associated arithmetic measures (dN, dPi, dpsi, dM) through a multiplicative
convolution algebra on a logarithmic grid, evaluate the counting functions
N, Pi, psi, psi1, M, m and the sharp Mertens constant by independent routes,
and run summability-kernel and boundary-behavior diagnostics near s = 1.
"""

from ._dispatch import BACKEND_NAME, HAVE_NATIVE
from .measures import LogGridMeasure, mconvolve, mexp, volterra_inverse, volterra_n_from_pi
from .systems import NumberSystem
from .scenarios import available_scenarios, build

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "HAVE_NATIVE",
    "LogGridMeasure",
    "NumberSystem",
    "available_scenarios",
    "build",
    "mconvolve",
    "mexp",
    "volterra_inverse",
    "volterra_n_from_pi",
    "__version__",
]
