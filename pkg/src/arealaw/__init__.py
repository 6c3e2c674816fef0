"""Entanglement of disordered harmonic oscillator systems on graphs.

Gaussian-state negativity and entropy from symplectic spectra, a truncated
number-basis oracle to check them, and a harness for disorder-averaged runs.
"""

from . import disorder, fock_oracle, gaussian, graph, oscillator, spectra
from ._kernels import BACKEND
from .errors import AssumptionViolation, GraphError, NotPositiveDefinite, NumericalConsistencyError

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AssumptionViolation",
    "GraphError",
    "NotPositiveDefinite",
    "NumericalConsistencyError",
    "disorder",
    "fock_oracle",
    "gaussian",
    "graph",
    "oscillator",
    "spectra",
]
