"""Steady water waves with vorticity: uniform streams, dispersion, spectra,
small-amplitude expansions and Stokes-branch continuation."""
from ._kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
