from __future__ import annotations

from typing import Optional


class HomogError(Exception):
    """Base class for every error raised by the homogenization routes."""

    exit_code = 1


class ConfigError(HomogError):
    """Settings or run configuration could not be resolved."""

    exit_code = 2


class ValidationError(HomogError):
    """Input rejected before any computation started."""

    exit_code = 2


class SolverError(HomogError):
    exit_code = 3


class NonConvergenceError(SolverError):
    """Iteration budget exhausted before the residual reached tolerance."""

    def __init__(self, message: str, best_residual: float, iterations: int) -> None:
        super().__init__(f"{message} (best residual {best_residual:.3e} after {iterations} iterations)")
        self.best_residual = best_residual
        self.iterations = iterations


class InstabilityError(SolverError):
    """Pseudo-time iterate became non-finite."""

    def __init__(self, message: str, iterations: Optional[int] = None) -> None:
        super().__init__(message if iterations is None else f"{message} at iteration {iterations}")
        self.iterations = iterations


class InfeasibleError(SolverError):
    """Linear program did not return an optimal feasible point."""
