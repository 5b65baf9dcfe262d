"""Two-term Weyl asymptotics for Schrodinger operators with inverse-square boundary potentials."""

from . import geometry, partition, pnu, riesz, specfun, spectra

__version__ = "0.1.0"
__all__ = ["geometry", "partition", "pnu", "riesz", "specfun", "spectra"]
