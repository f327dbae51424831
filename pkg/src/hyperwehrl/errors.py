"""Exception types shared by all modules."""

from __future__ import annotations


class HyperWehrlError(Exception):
    """Base class for every error raised by the package."""


class DomainError(HyperWehrlError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ParameterError(HyperWehrlError, ValueError):
    """A model parameter (k, q, preset constants) is not admissible."""


class AccuracyError(HyperWehrlError, ArithmeticError):
    """Refinement failed to reach the requested tolerance.

    Attributes
    ----------
    estimates : tuple of float
        The last two estimates produced before giving up.
    """

    def __init__(self, message: str, estimates: tuple = ()):
        super().__init__(message)
        self.estimates = tuple(estimates)


class IntegrationError(HyperWehrlError, RuntimeError):
    """The ODE integrator could not continue (step-size underflow)."""

    def __init__(self, message: str, diagnostic: dict | None = None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


class SearchError(HyperWehrlError, RuntimeError):
    """A bracketing search found no witness of the required kind."""


class OptimizationError(HyperWehrlError, RuntimeError):
    """An iterative minimizer hit its iteration cap.

    Attributes
    ----------
    trace : list of float
        Functional values recorded along the run.
    """

    def __init__(self, message: str, trace: list | None = None):
        super().__init__(message)
        self.trace = list(trace or [])


class PropertyViolation(HyperWehrlError):
    """A checked mathematical property failed on computed data.

    Attributes
    ----------
    report : dict
        Diagnostic payload (quantities involved, trajectory excerpt, ...).
    """

    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report or {}
