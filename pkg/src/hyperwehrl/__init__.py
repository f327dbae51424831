"""Coherent-state transforms on the hyperbolic disk and related inequalities.

Modules
-------
hyp_geom
    Disk and half-plane coordinates, invariant measures, adaptive quadrature.
su11_states
    Discrete-series states, coherent states and the transform ``L psi``.
functionals
    ``L^p`` norms, Wehrl and Renyi entropies, Fisher-type gradient integrals.
inequalities
    Sobolev-type and entropy bounds, entropy-energy curves, a 1-D minimizer.
ode_lab
    Shooting study of the radial Euler-Lagrange equation.
cli
    Command-line front end (``hyperwehrl``).
"""

from ._accel import HAVE_NUMBA, jit_enabled
from .errors import (AccuracyError, DomainError, HyperWehrlError, IntegrationError,
                     OptimizationError, ParameterError, PropertyViolation, SearchError)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "DomainError", "HyperWehrlError", "IntegrationError",
    "OptimizationError", "ParameterError", "PropertyViolation", "SearchError",
    "HAVE_NUMBA", "jit_enabled", "__version__",
]
